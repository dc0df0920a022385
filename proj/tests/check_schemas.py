import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

tool, schemas = sys.argv[1], pathlib.Path(sys.argv[2])


def load(name):
    return json.loads((schemas / name).read_text())


def run(*args):
    subprocess.run([tool, *args], check=True, capture_output=True)


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    pats = tmp / "patterns"
    pats.mkdir()
    for seed in range(3):
        run("simulate", "--beta0", "0.05", "--d", "0,1,2.5", "--theta", "-1,0.5,0.3", "--window", "0,30,0,30",
            "--steps", "20000", "--move-stddev", "0.5", "--seed", str(seed), "-o", str(pats / f"p{seed}.csv"))
    run("fit", str(pats / "p0.csv"), "--border", "5", "--cell-size", "5", "-o", str(tmp / "fit.json"))
    run("fit", str(pats / "p0.csv"), "--border", "5", "--cell-size", "5", "--upper", "0.1", "-o",
        str(tmp / "fail.json"))
    run("gnz-check", str(pats), "-o", str(tmp / "gnz.json"))
    spec = {"model": {"graph": "none"}, "theta": [0.5], "sim_window": [0, 20, 0, 20],
            "estimation_windows": [[0, 20, 0, 20]], "sampler": {"steps": 2000}, "cell_size": 5,
            "replications": 1, "seed": 1}
    (tmp / "spec.json").write_text(json.dumps(spec))
    run("replicate", str(tmp / "spec.json"), "-o", str(tmp / "summary.csv"))

    experiment = load("experiment.schema.json")
    jsonschema.validate(spec, experiment)
    jsonschema.validate(json.loads((tmp / "fit.json").read_text()), load("fit_report.schema.json"))
    jsonschema.validate(json.loads((tmp / "fail.json").read_text()), load("fit_report.schema.json"))
    jsonschema.validate(json.loads((tmp / "gnz.json").read_text()), load("gnz_report.schema.json"))
    summary = load("replicate_summary.schema.json")
    resolver = jsonschema.RefResolver(base_uri=(schemas.resolve().as_uri() + "/"), referrer=summary)
    jsonschema.validate(json.loads((tmp / "summary.json").read_text()), summary, resolver=resolver)
print("all reports match their schemas")
