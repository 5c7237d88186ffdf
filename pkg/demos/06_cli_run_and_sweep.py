"""The command-line workflow on the bundled configs.

Equivalent shell commands:
    radrec run --config demos/configs/separable.json --output report.json
    radrec sweep --config demos/configs/separable.json --param gamma --values 0.1,0.01,0.001
    radrec verify --suite counterterm
RADREC_THREADS caps the sweep worker pool.
"""
import json
import os
import tempfile

from radrec.cli import main

here = os.path.dirname(os.path.abspath(__file__))
config = os.path.join(here, "configs", "separable.json")

with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "report.json")
    code = main(["run", "--config", config, "--output", out])
    doc = json.load(open(out))
    print(f"run exit {code}; classes {[c['label'] for c in doc['classes']]}")
    print(f"cross section {doc['cross_section']:.6f}")

os.environ.setdefault("RADREC_THREADS", "2")
print("gamma sweep (smeared lowest order against the exact one):")
main(["sweep", "--config", config, "--param", "gamma", "--values", "0.1,0.01,0.001"])
main(["verify", "--suite", "counterterm"])

# a broken config reports the offending field and exits 1
bad = json.load(open(config))
bad["v_i"] = -1
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(bad, fh)
print(f"invalid config exit {main(['run', '--config', fh.name, '--output', os.devnull])}")
os.unlink(fh.name)
