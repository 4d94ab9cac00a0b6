"""Build a two-dimensional framed group over Z_2[pi]/(pi^2 - 2)."""

from wittkit.framed import extend_tower, frame_search, init_tower, verify_group_axioms
from wittkit.ring import EisensteinRing

R = EisensteinRing(2, 2, 12)
pi = R.pi
G1 = init_tower(2, R, pi)
print("dimension one:", G1.law_symbolic()[0])

frames = frame_search(G1, pi, [0, "pi", "pi^2", "1+pi"], depth=2)
print(f"{len(frames)} frames in the box:", [str(f.a[0]) for f in frames])

frame = next(f for f in frames if str(f.a[0]) == "W(0, pi)")
G2 = extend_tower(G1, frame, pi, levels=[(2, 2, 2)])
print("D_1 =", G2.D(1))
print("second coordinate of the law:\n ", G2.law_symbolic()[1])
rep = verify_group_axioms(G2, samples=20, seed=1)
print("axioms at 20 random points:", rep["passed"])
