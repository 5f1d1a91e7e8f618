"""
Six genome encodings on one problem
===================================

"""

# a random system with five nonconstants and its short sequence
import time
from lsinfer import GAConfig, infer
from lsinfer.encodings import SCHEMES
from lsinfer.genbench import GeneratorConfig, benchmark_sequence, generate_lsystem

system = generate_lsystem(GeneratorConfig(size=5, seed=34, constants="", max_len=6))
rho = benchmark_sequence(system, extra=0)
print(system)
print(rho.words)

# same seed and time budget for every encoding
for scheme in SCHEMES:
    cfg = GAConfig.for_scheme(scheme, seed=0, time_limit=20)
    t0 = time.perf_counter()
    res = infer(rho, scheme=scheme, cfg=cfg)
    print(f"{scheme:6s} {res.status:9s} gens={res.generations:5d} {time.perf_counter() - t0:7.2f}s")

# the matrix encodings only search free variables of the linear system
from lsinfer.encodings import build_matrix_system
print(build_matrix_system(rho, "lengths"))
