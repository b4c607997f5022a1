"""Regression against values frozen after their independent oracles passed."""
import json
from pathlib import Path

import numpy as np

from dimerstrip.qcombi import QSeries, character_closed_form
from dimerstrip.spectra import kappas
from dimerstrip.transfer import StripModel, double_row_transfer

FROZEN = json.loads((Path(__file__).parent / "golden" / "frozen.json").read_text())


def test_frozen_characters():
    for key, text in FROZEN["characters"].items():
        big_n, s = map(int, key.split(","))
        assert character_closed_form(big_n, s) == QSeries.from_text(text)


def test_frozen_kappas_passed_oracle():
    for key, rec in FROZEN["kappas"].items():
        n, w = map(int, key.split(","))
        assert rec["o1"] < 1e-12
        assert np.allclose(kappas(StripModel(n, w)), rec["kappa"], rtol=0, atol=1e-15)


def test_frozen_transfer_entries():
    for key, rows in FROZEN["transfer_pi_5"].items():
        n, w = map(int, key.split(","))
        ref = np.array([[complex(*v) for v in row] for row in rows])
        d = np.asarray(double_row_transfer(StripModel(n, w), np.pi / 5))
        assert np.abs(d - ref).max() < 1e-13
