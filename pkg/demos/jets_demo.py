"""Taylor jets: derivatives of exp(sin x) at x = 0.7 up to fourth order."""
import math

from recurv import jets as J

x = J.seed_variables([0.7], 4)[0]
f = J.exp(J.sin(x))
for k in range(5):
    print(f"d^{k}/dx^{k} exp(sin x) at 0.7 = {J.partial(f, (k,)):.15f}")

# two variables, mixed partials
u, v = J.seed_variables([1.0, 2.0], 2)
g = u * u * v + J.ln(v)
print("d2/du dv (u^2 v + ln v) =", J.partial(g, (1, 1)), "(expected", 2 * 1.0, ")")
print("d2/dv2 =", J.partial(g, (0, 2)), "(expected", -1 / 4, ")")
print("value matches plain float:", g.value == 1.0 * 1.0 * 2.0 + math.log(2.0))
