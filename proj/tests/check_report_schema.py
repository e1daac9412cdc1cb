# Copyright 2026 The bmlab Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Run the quick presets and validate their reports against docs/report_schema.json."""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema

PRESETS = ["chains", "oracles-2d", "concentration-desk"]


def main(cli, schema_path):
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    with tempfile.TemporaryDirectory() as out:
        env = dict(os.environ, BMLAB_OUTPUT_DIR=out)
        for name in PRESETS:
            subprocess.run([cli, "preset", name, "--run"], env=env, check=True, stdout=subprocess.DEVNULL)
            with open(os.path.join(out, name + ".report.json")) as f:
                report = json.load(f)
            for err in validator.iter_errors(report):
                bad += 1
                print(f"{name}: {list(err.absolute_path)}: {err.message[:200]}")
            print(f"{name}: ok" if bad == 0 else f"{name}: {bad} errors so far")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
