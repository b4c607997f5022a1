"""Read string patterns off a numerical spectrum and assemble the finitized characters."""

from dimerstrip.qcombi import character_closed_form
from dimerstrip.spectra import character_from_spectrum, match_spectrum, predicted_multiplicity
from dimerstrip.statespace import Sector
from dimerstrip.transfer import StripModel

model = StripModel(6, 0)
big_n = model.big_n
for s in (1, 3, 5, 7):
    sec = Sector.from_s(big_n, s)
    table = match_spectrum(model, sec)
    print(f"s={s}  d={sec.d}  dim={sec.dim}  u0={table.u0:.4f}")
    for pattern, mu in table.multiplicities.items():
        pred = predicted_multiplicity(pattern, big_n, s)
        print(f"   content {pattern}  E={str(pattern.energy):>4}  mult={mu}  diagrams={pred}")
    chi = character_from_spectrum(model, s, table=table)
    print(f"   chi = {chi.to_text()}")
    print(f"   closed form agrees: {chi == character_closed_form(big_n, s)}")

# half-integer energies appear when N + w is odd
table = match_spectrum(StripModel(7), Sector.from_s(7, 2))
print("N=7, s=2 energies:", {str(e): m for e, m in sorted(table.energies().items())})
