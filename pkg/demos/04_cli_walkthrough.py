"""Write the worked examples as problem files and drive the command line tool."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

from propersplit.gallery import export_problems

work = Path(tempfile.mkdtemp(prefix="propersplit-"))
runs = export_problems(work)
print("problem files in", work)
print((work / "alpha_without_strict_pinv_order.ini").read_text())

for label, argv in runs:
    out = subprocess.run([sys.executable, "-m", "propersplit", *argv], capture_output=True, text=True)
    rep = json.loads(out.stdout)
    res = rep["results"]
    if "verdict" in res:
        v = res["verdict"]
        summary = f"{v['theorem_id']} applicable={v['applicable']} conclusion={v['conclusion_holds']}"
    elif "report" in res:
        summary = f"converged={res['report']['converged']} iterations={res['report']['iterations']}"
    elif "classification" in res:
        summary = f"induced weak regular I={res['classification']['weak_regular_I']} rho(H)={res['rho_h']:.4f}"
    else:
        summary = ", ".join(f"{k}: rho={v['classification']['rho']:.4f}" for k, v in res.items() if "classification" in v)
        summary = summary or ", ".join(f"{k}: rho(H)={v['rho_h']:.4f}" for k, v in res.items())
    print(f"exit {out.returncode}  {label:42s} {summary}")
