"""Regenerates the synthetic price fixtures (deterministic, stdlib only).

btc_fixture.csv: 501 daily closes from a seeded regime-switching
log-normal walk with BTC-like daily volatility (bull, crash, recovery).
tiny_fixture.csv: 41 daily closes for fast CLI tests.
"""
import datetime
import math
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


def walk(seed, n, start_price, regimes):
    rng = random.Random(seed)
    prices = [start_price]
    for k in range(n - 1):
        drift, vol = next(r[1:] for r in regimes if k < r[0])
        prices.append(prices[-1] * math.exp(drift - 0.5 * vol * vol + vol * rng.gauss(0.0, 1.0)))
    return prices


def write(path, start, prices, comment):
    day = datetime.date.fromisoformat(start)
    lines = [f"# {comment}", "date,close"]
    for p in prices:
        lines.append(f"{day.isoformat()},{p:.2f}")
        day += datetime.timedelta(days=1)
    path.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    btc = walk(7, 501, 8000.0, [(180, 0.004, 0.030), (260, -0.008, 0.050), (501, 0.003, 0.035)])
    write(HERE / "btc_fixture.csv", "2020-01-01", btc, "synthetic BTC-like daily closes, seed 7")
    tiny = walk(11, 41, 100.0, [(41, 0.001, 0.02)])
    write(HERE / "tiny_fixture.csv", "2021-03-01", tiny, "synthetic daily closes, seed 11")
