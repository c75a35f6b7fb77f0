"""Smoke test for the eulerchar extension module.

Build first: pip install --no-build-isolation -e crates/python
"""
import json

import eulerchar

k = eulerchar.NumberField.quadratic(-5)
assert k.degree == 2 and k.signature() == (0, 1)
assert k.product_formula_check(-12, 35)

g = eulerchar.FiniteGroup.builtin("Q8")
assert len(g) == 8 and not g.is_abelian()

m = eulerchar.GaloisModule.trivial(eulerchar.FiniteGroup.builtin("C_2"), 3, [1])
a = m.cohomology()
b = m.cohomology("fp-linear")
assert a["dims"] == b["dims"] == [1, 0, 0], (a, b)
assert m.herbrand_quotient() == {}

assert eulerchar.lubotzky_r(1, 1, 1, 1, True) == 1

name, text = eulerchar.bundled_scenarios()[0]
reports = json.loads(eulerchar.run_scenarios(text))
print(name, [r["scenario_id"] for r in reports])

try:
    eulerchar.run_scenarios('{"scenarios": []}')
except ValueError as e:
    print("schema error:", e)
else:
    raise AssertionError("empty scenario list accepted")

print("ok")
