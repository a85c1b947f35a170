#!/usr/bin/env python3
"""Run the full default-configuration pipeline into ./out.

Produces spectrum.csv/json, audit.csv/json and the n=0 wavefunction dump,
then prints a short summary of the headline audit findings.
"""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from hykg.cli import main  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
CFG = str(ROOT / "configs" / "default.cfg")
OUT = ROOT / "out"


def run():
    for argv in (["spectrum", "--config", CFG, "--out", str(OUT)],
                 ["audit", "--config", CFG, "--out", str(OUT)],
                 ["wavefunction", "--config", CFG, "--out", str(OUT), "--n", "0"]):
        rc = main(argv)
        if rc != 0:
            raise SystemExit(rc)

    report = json.loads((OUT / "audit.json").read_text())
    print(f"\nwrote {OUT}/spectrum.csv, audit.csv/json, wf_n0.csv")
    print(f"engines found levels: {report['summary']['levels_found']}")
    row0 = report["rows"][0]
    print("headline n=0 findings:")
    for key in ("eq42_vs_derivative", "eq44_vs_eq12", "eq20_vs_eq23",
                "delta_a9_vs_eq35", "ode_residual_closedform"):
        print(f"  {key:24s} = {row0[key]}")
    print(f"  tau_prime_sign           = {row0['tau_prime_sign']} "
          "(no decreasing-tau branch exists at these parameters)")


if __name__ == "__main__":
    run()
