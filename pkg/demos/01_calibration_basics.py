"""Calibration basics: curves, posteriors, and summary statistics.

A calibration curve maps calendar dates (signed years, negative = BC)
to expected radiocarbon ages with a 1-sigma curve error.  Calibrating a
measured age turns it back into a probability mass over calendar dates.
This script loads the bundled synthetic study curve (or a real
intcal20.14c if you have placed one at data/intcal20.14c) and walks
through one calibration.

Run:  python demos/01_calibration_basics.py
"""

import finedating as fd


def pick_curve() -> fd.CalCurve:
    path = fd.locate_intcal20()
    if path is not None:
        print(f"using real curve file: {path}")
        return fd.load_curve(path, name="intcal20")
    print("intcal20.14c not found; using the synthetic study curve")
    return fd.synthetic_study_curve()


def main() -> None:
    curve = pick_curve()
    lo, hi = curve.domain
    print(f"curve {curve.name!r}: {curve.n_knots} knots, domain {lo:g} .. {hi:g}\n")

    for date in (-200.0, -75.0, 0.0):
        mu, sig = fd.curve_at(curve, date)
        print(f"curve at {date:6g}: {mu:7.1f} +- {sig:.1f} BP")

    meas = fd.Measurement(age=2087, sd=20)
    print(f"\ncalibrating {meas.age} +- {meas.sd:g} BP ...")
    result = fd.calibrate(curve, meas)
    print(f"  mean   {result.mean:8.2f}")
    print(f"  median {result.median:8.2f}")
    print(f"  sigma  {result.sigma:8.2f}")
    print(f"  posterior mass on {result.grid.size} one-year cells "
          f"(sums to {result.pdf.sum():.9f})")

    for label, segments in (("68.27%", result.hpd68), ("95.45%", result.hpd95)):
        print(f"  {label} intervals:")
        for start, end, prob in segments:
            print(f"    [{start:8.1f}, {end:8.1f}]  p={prob:.3f}")

    # a coarse text rendering of the posterior
    print("\nposterior shape:")
    step = max(1, result.grid.size // 24)
    peak = result.pdf.max()
    for i in range(0, result.grid.size, step):
        chunk = result.pdf[i : i + step]
        bar = "#" * int(40 * chunk.max() / peak)
        if bar:
            print(f"  {result.grid[i]:8.0f} {bar}")


if __name__ == "__main__":
    main()
