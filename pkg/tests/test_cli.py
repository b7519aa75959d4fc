"""Exit codes, artifact routing, and stdout discipline."""

from __future__ import annotations

import json
import os
import socket
import subprocess
import sys

import pytest

import oignon.cli as cli
from conftest import DATA
from oignon.openalex import ClientConfig, MockTransport, TransportResponse

SNAPSHOT = DATA / "corpus50.jsonl"


def _offline_argv(meta, *extra):
    return [
        "build",
        "--offline",
        str(SNAPSHOT),
        "--id",
        meta["source"],
        "--reference-year",
        str(meta["reference_year"]),
        "--built-at",
        meta["built_at"],
        *extra,
    ]


# ---------------------------------------------------------------------------
# Usage errors
# ---------------------------------------------------------------------------


def test_no_subcommand_is_usage_error(capsys):
    assert cli.main([]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "usage" in captured.err


def test_build_requires_exactly_one_identifier(corpus_meta):
    assert cli.main(["build"]) == 2
    assert cli.main(["build", "--id", "W1", "--doi", "10.1/x"]) == 2


def test_unknown_flag_is_usage_error():
    assert cli.main(["build", "--id", "W1", "--frobnicate"]) == 2


def test_author_requires_query():
    assert cli.main(["author"]) == 2


def test_invalid_config_value_is_usage_error(corpus_meta):
    argv = _offline_argv(corpus_meta, "--roots", "-1")
    assert cli.main(argv) == 2


def test_serve_needs_document_or_identifier():
    assert cli.main(["serve"]) == 2


# ---------------------------------------------------------------------------
# Offline builds against the goldens
# ---------------------------------------------------------------------------


def test_build_document_matches_golden(corpus_meta, capsysbinary):
    assert cli.main(_offline_argv(corpus_meta)) == 0
    out = capsysbinary.readouterr().out
    assert out == (DATA / "golden.document.json").read_bytes()


def test_build_dot_matches_golden(corpus_meta, capsysbinary):
    assert cli.main(_offline_argv(corpus_meta, "--format", "dot")) == 0
    assert capsysbinary.readouterr().out == (DATA / "golden.dot").read_bytes()


def test_build_svg_matches_golden(corpus_meta, capsysbinary):
    assert cli.main(_offline_argv(corpus_meta, "--format", "svg")) == 0
    assert capsysbinary.readouterr().out == (DATA / "golden.svg").read_bytes()


def test_out_flag_writes_file_and_keeps_stdout_empty(corpus_meta, tmp_path, capsysbinary):
    target = tmp_path / "nested" / "doc.json"
    assert cli.main(_offline_argv(corpus_meta, "--out", str(target))) == 0
    assert capsysbinary.readouterr().out == b""
    assert target.read_bytes() == (DATA / "golden.document.json").read_bytes()


def test_doi_lookup_works_offline(corpus_works, corpus_meta, capsysbinary):
    with_doi = next(w for w in corpus_works if w.doi)
    code = cli.main(
        [
            "build",
            "--offline",
            str(SNAPSHOT),
            "--doi",
            with_doi.doi,
            "--reference-year",
            "2026",
            "--built-at",
            corpus_meta["built_at"],
        ]
    )
    assert code == 0
    doc = json.loads(capsysbinary.readouterr().out)
    assert doc["source"] == with_doi.id


def test_built_at_and_reference_year_are_frozen_into_document(corpus_meta, capsysbinary):
    argv = [
        "build",
        "--offline",
        str(SNAPSHOT),
        "--id",
        corpus_meta["source"],
        "--reference-year",
        "2030",
        "--built-at",
        "2031-02-03T04:05:06Z",
    ]
    assert cli.main(argv) == 0
    doc = json.loads(capsysbinary.readouterr().out)
    assert doc["built_at"] == "2031-02-03T04:05:06Z"
    assert doc["config"]["reference_year"] == 2030


def test_select_highlights_node_in_svg(corpus_meta, corpus_document, capsysbinary):
    nodes = json.loads(corpus_document)["nodes"]
    target = next(n["id"] for n in nodes if n["role"] != "Source")
    argv = _offline_argv(corpus_meta, "--format", "svg", "--select", target)
    assert cli.main(argv) == 0
    assert b"#f5e6a3" in capsysbinary.readouterr().out


def test_select_unknown_node_is_usage_error(corpus_meta, capsysbinary):
    argv = _offline_argv(corpus_meta, "--format", "svg", "--select", "W999x")
    assert cli.main(argv) == 2
    assert capsysbinary.readouterr().out == b""


def test_author_build_offline(capsysbinary):
    code = cli.main(
        ["author", "--offline", str(SNAPSHOT), "--author", "A5001", "--built-at",
         "2026-01-01T00:00:00Z", "--reference-year", "2026"]
    )
    assert code == 0
    doc = json.loads(capsysbinary.readouterr().out)
    assert doc["source"] is None
    assert doc["nodes"]
    assert {n["role"] for n in doc["nodes"]} == {"AuthorWork"}


# ---------------------------------------------------------------------------
# Error code mapping
# ---------------------------------------------------------------------------


def test_unknown_work_offline_exits_3(capsysbinary):
    assert cli.main(["build", "--offline", str(SNAPSHOT), "--id", "W999x"]) == 3
    assert capsysbinary.readouterr().out == b""


def test_unknown_author_offline_exits_3():
    assert cli.main(["author", "--offline", str(SNAPSHOT), "--author", "Nobody"]) == 3


def test_missing_snapshot_file_is_usage_error(tmp_path):
    missing = tmp_path / "absent.jsonl"
    assert cli.main(["build", "--offline", str(missing), "--id", "W1"]) == 2


def test_online_not_found_exits_3(monkeypatch, tmp_path, capsysbinary):
    monkeypatch.setattr(cli, "_transport_factory", MockTransport)
    monkeypatch.setenv("OIGNON_CACHE_DIR", str(tmp_path / "cache"))
    assert cli.main(["build", "--id", "W1"]) == 3
    assert capsysbinary.readouterr().out == b""


def test_online_transport_failure_exits_4(monkeypatch, tmp_path, capsysbinary):
    def factory():
        transport = MockTransport()
        transport.add(
            "https://api.openalex.org/works/W1", TransportResponse(400, "bad")
        )
        return transport

    monkeypatch.setattr(cli, "_transport_factory", factory)
    monkeypatch.setenv("OIGNON_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.delenv("OIGNON_MAILTO", raising=False)
    assert cli.main(["build", "--id", "W1"]) == 4
    assert capsysbinary.readouterr().out == b""


def test_busy_port_exits_4(tmp_path, corpus_document):
    doc = tmp_path / "doc.json"
    doc.write_bytes(corpus_document)
    blocker = socket.socket()
    try:
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        code = cli.main(
            ["serve", "--document", str(doc), "--port", str(port)]
        )
        assert code == 4
    finally:
        blocker.close()


# ---------------------------------------------------------------------------
# Configuration wiring
# ---------------------------------------------------------------------------


def test_mailto_env_default_and_flag_override(monkeypatch):
    monkeypatch.setenv("OIGNON_MAILTO", "env@example.org")
    assert ClientConfig().mailto == "env@example.org"
    parser = cli.build_arg_parser()
    args = parser.parse_args(["build", "--id", "W1", "--mailto", "flag@example.org"])
    assert cli._client_config(args).mailto == "flag@example.org"
    args = parser.parse_args(["build", "--id", "W1"])
    assert cli._client_config(args).mailto == "env@example.org"


def test_cache_dir_env_default_and_flag_override(monkeypatch, tmp_path):
    monkeypatch.setenv("OIGNON_CACHE_DIR", str(tmp_path / "from-env"))
    assert ClientConfig().cache_dir == tmp_path / "from-env"
    parser = cli.build_arg_parser()
    args = parser.parse_args(
        ["build", "--id", "W1", "--cache-dir", str(tmp_path / "from-flag")]
    )
    assert cli._client_config(args).cache_dir == tmp_path / "from-flag"


def test_apply_overrides_maps_known_keys(frozen_config):
    updated = cli._apply_overrides(
        frozen_config,
        {"roots": 3, "branches": 4, "branch_seed_cap": 9, "candidate_pool_cap": 11,
         "half_life": 2.5, "reference_year": 2030, "mystery": True},
    )
    assert updated.top_roots_k == 3
    assert updated.top_branches_k == 4
    assert updated.branch_seed_cap == 9
    assert updated.candidate_pool_cap == 11
    assert updated.recency.half_life == 2.5
    assert updated.recency.reference_year == 2030


def test_apply_overrides_keeps_base_when_empty(frozen_config):
    assert cli._apply_overrides(frozen_config, {}) == frozen_config


# ---------------------------------------------------------------------------
# Process-level stdout purity
# ---------------------------------------------------------------------------


def _clean_env():
    return {k: v for k, v in os.environ.items() if not k.startswith("OIGNON_")}


def test_subprocess_stdout_carries_only_the_artifact(corpus_meta):
    result = subprocess.run(
        [sys.executable, "-m", "oignon"] + _offline_argv(corpus_meta),
        capture_output=True,
        env=_clean_env(),
        timeout=60,
    )
    assert result.returncode == 0
    assert result.stdout == (DATA / "golden.document.json").read_bytes()
    assert b"INFO" not in result.stdout


def test_subprocess_usage_error_writes_nothing_to_stdout():
    result = subprocess.run(
        [sys.executable, "-m", "oignon", "build"],
        capture_output=True,
        env=_clean_env(),
        timeout=60,
    )
    assert result.returncode == 2
    assert result.stdout == b""
    assert b"error" in result.stderr
