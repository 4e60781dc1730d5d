"""Engineered Rabi oscillations inside a bounded Fock window.

Runs the four validation scenarios (two- and three-step ladders, starting
at the vacuum and sliced at M = 3), compares the full multi-branch Raman
dynamics against the engineered target interaction and the closed-form
probability curves, and writes the sampled series as CSV.

Usage: python demos/rabi_validation.py [outdir]
"""

import sys
from pathlib import Path

from fockladder import load_scenario, run_scenario, series_to_csv, summary_to_json

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo-output")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name in ("fig2a", "fig2b", "fig3a", "fig3b"):
        config = load_scenario(name)
        print(f"== {name}: {config.description}")
        result = run_scenario(config)

        couplings = result.summary["couplings"]
        print(f"   solved laser detunings: "
              f"{[round(d, 5) for d in result.summary['detunings']['solved_delta_tilde']]}")
        print(f"   ladder reference coupling |zeta_ref| = {abs(complex(*couplings['zeta_ref'])):.5g}")
        print(f"   weight mismatch vs the uniform target: {couplings['weight_mismatch']:.4f}")

        devs = result.summary["deviations"]
        print(f"   engineered vs closed forms: {devs['engineered_vs_analytic']:.2e}")
        print(f"   full vs engineered (in-window): {devs['full_vs_engineered']:.4f}")
        print(f"   population outside the window: {devs['outside_subspace']:.4f}")

        (OUT / f"{name}.csv").write_text(series_to_csv(result.series, config.time_column))
        (OUT / f"{name}.json").write_text(summary_to_json(result.summary))
        print(f"   wrote {OUT / name}.csv and .json\n")

    print("The engineered model reproduces the closed forms to solver accuracy.")
    print("The full dynamics agrees qualitatively; at the published drive")
    print("hierarchies (Delta/lambda = 10-20) the second-order elimination")
    print("shifts the Rabi frequency by 10-20%, visible as a growing phase lag.")


if __name__ == "__main__":
    main()
