"""Quick smoke run of small scenarios end to end.

Run: python -m tests.smoke_test
Takes well under a minute; writes nothing to disk.
"""

import sys

from dotenv import load_dotenv

load_dotenv()

from src.core.errors import GPFluctuationsError
from src.core.io import build_config
from src.core.potentials import build_potential
from src.core.scattering import solve_neumann, solve_zero_energy
from src.core.suites import run_suite
from src.mcp.formatters import format_checks
from src.models.schemas import PotentialSpec

SMALL_RUNS = {
    "fock-check": {"fock.modes": "2", "fock.n": "3", "fock.samples": "10", "fock.excitations": "true"},
    "bogoliubov-check": {"bogoliubov.n": "3", "bogoliubov.order": "6", "bogoliubov.n_values": "3,4",
                         "bogoliubov.remainder_n_values": "16,32", "bogoliubov.standard_truncations": "8,12"},
    "depletion": {"depletion.n_values": "2,4", "depletion.modes": "2", "depletion.steps": "2",
                  "depletion.t_final": "0.2"},
}


def main():
    failures = 0
    try:
        # 1. Scattering length of the default square well
        print("1. Zero-energy scattering...")
        V = build_potential(PotentialSpec())
        zero = solve_zero_energy(V)
        print(f"   a0 = {zero.a0:.6f} (support radius {zero.support_radius})")

        # 2. Neumann problem at a moderate N
        print("\n2. Neumann problem at N=100...")
        neumann = solve_neumann(V, 100, 0.5)
        print(f"   lambda_ell = {neumann.lambda_ell:.6e}")

        # 3. Small scenarios through the suite runner
        for step, (scenario, entries) in enumerate(SMALL_RUNS.items(), start=3):
            print(f"\n{step}. Scenario {scenario}...")
            records = run_suite(build_config({"scenario": scenario, "seed": "1", **entries}))
            checks = [c for r in records for c in r.checks]
            failed = [c for c in checks if not c.passed]
            print(f"   {len(records)} records, {len(checks)} checks, {len(failed)} failed")
            if failed:
                print(format_checks(failed))
                failures += len(failed)

    except GPFluctuationsError as e:
        print(f"\nRun error: {type(e).__name__}: {e}")
        sys.exit(1)

    if failures:
        print(f"\n{failures} checks failed")
        sys.exit(1)
    print("\nAll checks passed!")


if __name__ == "__main__":
    main()
