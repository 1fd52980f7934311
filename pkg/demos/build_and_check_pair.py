"""Build a cylinder-family pair over the unit circle and put it through
the full check battery, printing each report row along the way."""
import json

from darboux_forge.curve_ribaucour import curve_from_spec
from darboux_forge.darboux_factory import darboux_partner
from darboux_forge.verifier import run_all

curve = curve_from_spec("circle:R=1")
pair = darboux_partner("cylinder", curve, 2.0, (1.0, 1.0, 1.0))
print(f"built {pair.f.name} and its partner {pair.f_tilde.name}")
print(f"dimension n = {pair.n}, transform parameter A = {pair.states[0].A:g}")

doc = pair.to_json(table_rows=5)
print("\ncongruence table sample (center in R^4, radius):")
for row in doc["congruence"]:
    center = ", ".join(f"{v: .4f}" for v in row["center"])
    print(f"  s = {row['s']:6.3f}  center = ({center})  R = {row['radius']:.4f}")

print("\nrunning the battery...")
report = run_all(pair)
for item in report["checks"]:
    status = "pass" if item["pass"] else "FAIL"
    line = (f"  {item['name']:<22} {status}  worst {item['max_residual']:.3e}"
            f"  (tol {item['tolerance']:g})")
    if item.get("detail"):
        line += f"  [{item['detail']}]"
    print(line)
print(f"\noverall: {'pass' if report['pass'] else 'FAIL'}")

with open("demo_pair.json", "w") as fh:
    json.dump(pair.to_json(), fh, indent=2)
print("wrote demo_pair.json "
      "(rebuild and recheck it with: darboux-forge verify demo_pair.json)")
