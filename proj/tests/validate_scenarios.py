"""Checks the scenario files against docs/scenario.schema.json."""
import glob
import json
import sys

import jsonschema

docs = sys.argv[1]
schema = json.load(open(f"{docs}/scenario.schema.json"))
jsonschema.Draft202012Validator.check_schema(schema)
for path in sorted(glob.glob(f"{docs}/scenarios/*.json")):
    jsonschema.validate(json.load(open(path)), schema)
    print("valid", path)
