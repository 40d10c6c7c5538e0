# Regenerates bessel_reference.csv (mpmath, 40 significant digits).
# Values below 1e-290 are left out: they sit under f64's normal range.
import pathlib

import mpmath as mp

mp.mp.dps = 40
ns = [0, 1, 2, 3, 4, 5, 7, 10, 20, 50, 100, 200, 500, 1000, 1500, 1990, 2000]
xs = ["0.001", "0.1", "1", "2.5", "7.3", "10", "30", "99.5", "100", "250.25",
      "500", "999", "1000", "1500", "1999.5", "2000"]
rows = []
for x in xs:
    for n in ns:
        v = mp.besselj(n, mp.mpf(x))
        if v != 0 and abs(v) < mp.mpf("1e-290"):
            continue
        rows.append(f"{n},{x},{mp.nstr(v, 25, min_fixed=0, max_fixed=0)}")
out = pathlib.Path(__file__).with_name("bessel_reference.csv")
out.write_text("n,x,jn\n" + "\n".join(rows) + "\n")
