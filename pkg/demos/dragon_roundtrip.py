"""
Deriving and recovering the dragon curve
========================================

"""

# load a hand-written system and grow it for a few steps
from pathlib import Path
from lsinfer import derive_sequence, infer, is_compatible, parse_lsystem

data = Path(__file__).resolve().parent.parent / "data"
dragon = parse_lsystem((data / "dragon.lsys").read_text())
rho = derive_sequence(dragon, 3)
for w in rho.words:
    print(w)

# forget the rules and ask for a system that reproduces the words
res = infer(rho, scheme="ml")
print(res.status, f"{res.wall_time:.3f}s", "generations:", res.generations)
print(res.system)

# the answer regenerates exactly the same sequence
print(is_compatible(res.system, rho.words))
