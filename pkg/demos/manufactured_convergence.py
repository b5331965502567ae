"""Temporal convergence against a manufactured solution.

theta*(x, t) = a e^{-t} cos(x1) is an exact solution once the force
f = a (nu - 1) e^{-t} cos(x1) is supplied: a single Fourier mode advects
itself to zero for every alpha, so the only error left is the Runge-Kutta
time quadrature.  Halving dt must divide the error by 16, and the same
fourth-order collapse shows up in the built-in balance residuals.
"""

from gsqg.cli import manufactured_errors

M, T = 64, 1.0
print(f"M = {M}, T = {T}, exact solution a e^(-t) cos(x1)")
print(f"{'dt':>7} {'L2 error':>11} {'res_ham':>11} {'res_l2':>11}"
      f" {'ratio':>7}")

prev = None
for dt in (0.2, 0.1, 0.05, 0.025):
    err, rham, rl2 = manufactured_errors(M=M, dt=dt, T=T)
    ratio = f"{prev / err:7.2f}" if prev is not None else "      -"
    print(f"{dt:7.3f} {err:11.3e} {rham:11.3e} {rl2:11.3e} {ratio}")
    prev = err

print("\nfourth order: every halving should print a ratio near 16")
