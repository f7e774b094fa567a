"""Print the cost, threshold and budget tables as markdown.

    python3 demos/thresholds.py
"""

from gsedetect import analysis
from gsedetect.cli import format_rows


def main():
    print("## Cost\n")
    rows = [analysis.cost_table(m, n, construct=(m == 4)) for m, n in analysis.TABLE_SIZES]
    print(format_rows(rows, "markdown"))
    print("## Improvement threshold and success probabilities at s = 0.99999\n")
    print(format_rows(analysis.threshold_table(), "markdown"))
    print("## Arbitrary-error threshold and target rate\n")
    print(format_rows(analysis.optimistic_table(), "markdown"))
    print("## Second-round budget\n")
    print(format_rows(analysis.budget_table(), "markdown"))

    # the threshold moves with the detection overhead d
    p = analysis.ThresholdParams.for_lattice(4, 4)
    c, d = p.c, p.d
    for scale in (0.5, 1, 2, 4):
        s = analysis.improvement_threshold_s(c, d * scale)
        print(f"d = {d * scale:7.1f}: s* = {s:.6f}")


if __name__ == "__main__":
    main()
