#!/usr/bin/env python3
"""Regenerates the bundled data files under data/ (profiles, grid traces,
SCC table). Deterministic; run from the repository root."""
import math
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"


def write_profiles() -> None:
    profiles = ROOT / "profiles"
    profiles.mkdir(parents=True, exist_ok=True)

    with open(profiles / "solar_northeast.csv", "w") as f:
        f.write("day,kwh_per_kw\n")
        for d in range(365):
            value = 4.0 * (1.0 + 0.35 * math.cos(2.0 * math.pi * (d - 171) / 365.0))
            f.write(f"{d + 1},{value:.6f}\n")

    with open(profiles / "temperature_northeast.csv", "w") as f:
        f.write("day,temp_c\n")
        for d in range(365):
            value = 10.0 - 13.0 * math.cos(2.0 * math.pi * (d - 27) / 365.0)
            f.write(f"{d + 1},{value:.3f}\n")


def write_traces() -> None:
    traces = ROOT / "traces"
    traces.mkdir(parents=True, exist_ok=True)
    regions = {
        "BPAT": (95.0, 20.0, 12.0),
        "CAISO": (240.0, 60.0, 25.0),
        "ISONE": (310.0, 45.0, 20.0),
        "PJM": (395.0, 40.0, 22.0),
        "SC": (520.0, 35.0, 18.0),
    }
    for name, (mean, diurnal, noise) in regions.items():
        rng = random.Random(name)
        with open(traces / f"{name}.csv", "w") as f:
            f.write("timestamp,gco2eq_per_kwh\n")
            for hour in range(8760):
                day = hour // 24
                hod = hour % 24
                seasonal = 0.08 * mean * math.cos(2.0 * math.pi * (day - 20) / 365.0)
                daily = diurnal * math.sin(2.0 * math.pi * (hod - 4) / 24.0)
                wobble = rng.uniform(-noise, noise)
                value = max(1.0, mean + seasonal + daily + wobble)
                month = 1 + day // 31
                f.write(
                    f"2020-{min(month, 12):02d}-{(day % 31) + 1:02d}T{hod:02d}:00,"
                    f"{value:.2f}\n"
                )


def write_scc() -> None:
    scc = ROOT / "scc"
    scc.mkdir(parents=True, exist_ok=True)
    with open(scc / "scc_2pct.csv", "w") as f:
        f.write("year,usd_per_ton\n")
        for year in range(2020, 2061):
            f.write(f"{year},{190.0 + 4.0 * (year - 2025):.2f}\n")


if __name__ == "__main__":
    write_profiles()
    write_traces()
    write_scc()
    print(f"wrote data under {ROOT}")
