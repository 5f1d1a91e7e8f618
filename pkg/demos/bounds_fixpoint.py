"""
What the evidence alone pins down
=================================

"""

# a branching seaweed model, observed for |nonconstants| + 1 steps
from pathlib import Path
from lsinfer import derive_sequence, parse_lsystem
from lsinfer.reduction import init_bounds, fixpoint, Evidence

data = Path(__file__).resolve().parent.parent / "data"
model = parse_lsystem((data / "dipterosiphonia.lsys").read_text())
rho = derive_sequence(model, len(model.alphabet.nonconstants))
print([len(w) for w in rho.words])

# starting bounds come straight from word lengths and symbol counts
state = init_bounds(rho)
print("widths before:", state.width())

# run the refinement rules until nothing changes
state = fixpoint(state, rho, Evidence(rho))
print("widths after:", state.width())

# rules already fully determined
known = state.known_all()
print(len(known), "of", len(model.alphabet.nonconstants), "successors known")
for g in sorted(known):
    flag = "" if known[g] == model.succ(g) else "  (differs!)"
    print(f"  {g} -> {known[g]}{flag}")

# the remaining ones still have a window of possible lengths
for g in model.alphabet.nonconstants:
    if g not in known:
        a = state.idx(g)
        print(" ", g, "length in", (int(state.len_min[a]), int(state.len_max[a])))

# and the true system never falls outside the bounds
print("violations:", state.violations(model))
