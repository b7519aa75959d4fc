"""Fixtures around the committed 50-work corpus and its frozen build."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from helpers import offline_client
from oignon.builder import CitationGraph, GraphConfig, build_graph
from oignon.export import export_document
from oignon.layout import LayoutConfig, LayoutedGraph, layout_graph
from oignon.openalex import load_snapshot
from oignon.ranking import RecencyParams

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def corpus_meta() -> dict:
    return json.loads((DATA / "corpus50.meta.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def corpus_works():
    return load_snapshot(DATA / "corpus50.jsonl")


@pytest.fixture(scope="session")
def frozen_config(corpus_meta) -> GraphConfig:
    return GraphConfig(
        recency=RecencyParams(
            half_life=corpus_meta["half_life"],
            reference_year=corpus_meta["reference_year"],
        )
    )


@pytest.fixture(scope="session")
def corpus_graph(corpus_works, corpus_meta, frozen_config, tmp_path_factory) -> CitationGraph:
    client = offline_client(corpus_works, tmp_path_factory.mktemp("corpus-build"))
    return build_graph(corpus_meta["source"], frozen_config, client)


@pytest.fixture(scope="session")
def corpus_layout(corpus_graph) -> LayoutedGraph:
    return layout_graph(corpus_graph, LayoutConfig())


@pytest.fixture(scope="session")
def corpus_document(corpus_layout, corpus_graph, frozen_config, corpus_meta) -> bytes:
    return export_document(
        corpus_layout,
        corpus_graph,
        frozen_config,
        LayoutConfig(),
        built_at=corpus_meta["built_at"],
    )
