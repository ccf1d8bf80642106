"""Release criterion for the exporter: closure with the scoring pipeline."""

import json
import threading
import time

import pytest
import uvicorn
from fastapi.testclient import TestClient

from embed_exporter.export import Encoder, ExportJob, export
from embed_exporter.service import create_app

from uot_errant.cli import main as uot_main
from uot_errant.embedder import RemoteEmbedder

SRC = ["He go to school every days .", "I has a apple in bag ."]
HYP = ["He goes to school every days .", "I have a apple in bag ."]
REF = ["He go to school every day .", "I has an apple in bag ."]


def _report(name, ok):
    print(f"{'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


def _write_corpus(tmp_path):
    paths = {}
    for name, lines in [("src", SRC), ("hyp", HYP), ("ref", REF)]:
        p = tmp_path / f"{name}.txt"
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths[name] = str(p)
    return paths


def test_exporter_closure(tiny_model_dir, tmp_path, capsys):
    paths = _write_corpus(tmp_path)

    # enumerate -> export -> score with the store backend
    code = uot_main(["enumerate", "--src", paths["src"], "--hyp",
                     paths["hyp"], "--refs", paths["ref"]])
    listing = capsys.readouterr().out
    assert code == 0
    sentences = tmp_path / "sentences.txt"
    sentences.write_text(listing, encoding="utf-8")
    store = tmp_path / "store.jsonl"
    encoder = Encoder(tiny_model_dir, pooling="mean")
    export(ExportJob(str(sentences), tiny_model_dir, str(store)), encoder)

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"embedder": f"store:{store}"}),
                   encoding="utf-8")
    out = tmp_path / "report.json"
    code = uot_main(["score", "--src", paths["src"], "--hyp", paths["hyp"],
                     "--refs", paths["ref"], "--config", str(cfg),
                     "--out", str(out)])
    capsys.readouterr()
    score_ok = code == 0  # exit 3 would mean a MissingEmbedding was hit
    report = json.loads(out.read_text(encoding="utf-8"))
    report_ok = len(report["sentences"]) == len(SRC)

    # the served /embed responses satisfy the contract shape checks
    client = TestClient(create_app(encoder))
    body = client.post("/embed", json={"texts": listing.splitlines()}).json()
    serve_ok = (body["dim"] == encoder.dim
                and len(body["vectors"]) == len(listing.splitlines())
                and all(len(v) == encoder.dim for v in body["vectors"]))

    _report(
        "exporter closure: export over enumerate output scores with zero "
        "missing embeddings; /embed responses match the contract",
        score_ok and report_ok and serve_ok,
    )


def test_remote_backend_against_live_service(tiny_model_dir, tmp_path):
    """The scoring library's remote backend works against a real server."""
    encoder = Encoder(tiny_model_dir, pooling="mean")
    config = uvicorn.Config(create_app(encoder), host="127.0.0.1", port=0,
                            log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        deadline = time.monotonic() + 10
        while not server.started:
            if time.monotonic() > deadline:
                pytest.fail("server did not start")
            time.sleep(0.02)
        port = server.servers[0].sockets[0].getsockname()[1]
        remote = RemoteEmbedder(f"http://127.0.0.1:{port}")
        vec = remote.embed("the cat sat")
        direct = encoder.encode(["the cat sat"])[0]
        assert vec.shape == (encoder.dim,)
        assert abs(vec - direct).max() < 1e-6
    finally:
        server.should_exit = True
        thread.join(timeout=10)
