"""Rank-2 Jordan blocks of the strip Hamiltonian, sector by sector."""
import warnings
from math import comb

from dimerstrip.spectra import hamiltonian, jordan_structure
from dimerstrip.transfer import StripModel

warnings.simplefilter("ignore", RuntimeWarning)
print(" N  w   d  dim  rank-2  binom(N-2,d-1)  exact")
for w in (0, 1):
    for big_n in range(2, 9):
        model = StripModel(big_n - w, w)
        for sec in model.sectors():
            rep = jordan_structure(hamiltonian(model, sec))
            expect = comb(big_n - 2, sec.d - 1) if big_n % 2 == 0 and 1 <= sec.d < big_n else 0
            print(f"{big_n:2d}  {w}  {sec.d:2d}  {sec.dim:3d}  {rep.count(2):6d}  {expect:14d}  {rep.exact_agrees}")
