"""Step-complexity measurements: the two headline bounds.

1. The counter's amortized shared-memory steps per operation stay flat
   as the operation count grows by three orders of magnitude.
2. The approximate max register's worst-case steps grow doubly
   logarithmically: squaring the value bound adds at most one step.
"""

from relaxobj.bench import BenchConfig, measure_amortized, measure_worst_case


def main():
    print("counter amortized steps/op (n=16, k=4, 90% increments):")
    config = BenchConfig(object="counter", n=16, k=4, total_ops=10**6,
                         read_fraction=0.1, seed=1)
    report = measure_amortized(config)
    print(f"  {'ops':>9}  {'steps':>8}  {'amortized':>9}  {'max op':>6}")
    for c in report.checkpoints:
        print(f"  {c.ops:>9}  {c.total_steps:>8}  {float(c.amortized):>9.4f}"
              f"  {c.max_op_steps:>6}")

    print()
    print("approximate max register worst-case steps (k=2):")
    print(f"  {'m':>8}  {'observed max':>12}  {'analytic bound':>14}")
    for exponent in (8, 16, 32, 64):
        config = BenchConfig(object="maxreg-approx", n=2, k=2, m=2**exponent,
                             total_ops=400, read_fraction=0.3, seed=1)
        report = measure_worst_case(config)
        print(f"  2^{exponent:<6}  {report.max_op_steps:>12}  {report.step_bound:>14}")


if __name__ == "__main__":
    main()
