"""Runs `housegan serve` against a freshly trained tiny checkpoint and checks
every response against the schemas in the shipped OpenAPI document."""

import argparse
import base64
import json
import re
import struct
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request
from pathlib import Path

import jsonschema


def validator(doc, name):
    schema = dict(doc)
    schema["$ref"] = f"#/components/schemas/{name}"
    return jsonschema.Draft202012Validator(schema)


def call(base, path, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(base + path, data=data, headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=60) as r:
            return r.status, json.loads(r.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--openapi", required=True)
    args = ap.parse_args()
    doc = json.loads(Path(args.openapi).read_text())
    jsonschema.Draft202012Validator.check_schema(doc["components"]["schemas"]["GenerateResponse"])

    failures = []

    def check(cond, what):
        print(("ok   " if cond else "FAIL ") + what)
        if not cond:
            failures.append(what)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        subprocess.run([args.cli, "synth-corpus", "--out", str(tmp / "corpus"), "--per-group", "4", "--seed", "2"],
                       check=True, stdout=subprocess.DEVNULL)
        subprocess.run([args.cli, "train", "--corpus", str(tmp / "corpus"), "--group", "7-9", "--preset", "tiny",
                        "--iters", "2", "--batch-size", "2", "--out", str(tmp / "ckpts" / "tiny.ckpt"), "--quiet"],
                       check=True, stdout=subprocess.DEVNULL)
        server = subprocess.Popen([args.cli, "serve", "--ckpt-dir", str(tmp / "ckpts"), "--port", "0",
                                   "--openapi", args.openapi],
                                  stdout=subprocess.PIPE, text=True)
        try:
            line = server.stdout.readline()
            port = int(re.search(r":(\d+) ", line).group(1))
            base = f"http://127.0.0.1:{port}"
            for _ in range(50):
                try:
                    call(base, "/roomtypes")
                    break
                except OSError:
                    time.sleep(0.1)

            status, rt = call(base, "/roomtypes")
            check(status == 200 and not list(validator(doc, "RoomTypes").iter_errors(rt)), "GET /roomtypes schema")
            check([r["code"] for r in rt] == list(range(10)), "room types in one-hot order")

            status, cks = call(base, "/checkpoints")
            check(status == 200 and not list(validator(doc, "Checkpoints").iter_errors(cks)), "GET /checkpoints schema")
            check(len(cks) == 1 and cks[0]["held_out_group"] == "7-9", "one checkpoint with its held-out group")

            diagram = {"nodes": [{"id": i, "type": t} for i, t in enumerate([0, 1, 2, 3])],
                       "edges": [[0, 1], [0, 2], [2, 3]]}
            req = {"diagram": diagram, "num_samples": 3, "seed": 5, "checkpoint_id": cks[0]["id"],
                   "include_masks": True}
            check(not list(validator(doc, "GenerateRequest").iter_errors(req)), "request example schema")
            status, out = call(base, "/generate", req)
            errors = list(validator(doc, "GenerateResponse").iter_errors(out))
            for e in errors[:3]:
                print("   ", e.message)
            check(status == 200 and not errors, "POST /generate schema")
            check(len(out["samples"]) == 3, "three samples")

            masks = out["samples"][0]["masks"]
            raw = base64.b64decode(masks["data"], validate=True)
            n, h, w = masks["shape"]
            values = struct.unpack(f"<{n * h * w}f", raw)
            check(len(raw) == 4 * n * h * w and all(-1.0 <= v <= 1.0 for v in values), "masks decode as float32")

            again = dict(req, num_samples=1, include_masks=False, pinned_noise=out["samples"][1]["noise"])
            again.pop("seed")
            status, pinned = call(base, "/generate", again)
            check(status == 200 and pinned["samples"][0]["layout"] == out["samples"][1]["layout"],
                  "pinned noise reproduces the layout")

            bad = [
                ("self loop", dict(req, diagram={"nodes": diagram["nodes"], "edges": [[1, 1]]}), 400),
                ("unknown checkpoint", dict(req, checkpoint_id="missing"), 404),
                ("ghost node", dict(req, pinned_noise={"9": [0.0] * 8}), 422),
            ]
            for name, body, want in bad:
                status, err = call(base, "/generate", body)
                check(status == want and not list(validator(doc, "Error").iter_errors(err)),
                      f"{name} -> {want} with error schema")

            status, served = call(base, "/openapi.json")
            check(status == 200 and served == doc, "GET /openapi.json serves the shipped document")
        finally:
            server.terminate()
            server.wait(timeout=10)

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
