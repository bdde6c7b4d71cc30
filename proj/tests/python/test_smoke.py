"""Smoke tests for the ladrag python bindings against the shipped fixtures."""

import json
import os
import pathlib

import pytest

import ladrag

FIXTURES = pathlib.Path(os.environ["LADRAG_FIXTURES_DIR"])


@pytest.fixture(scope="module")
def refdoc():
    gateway = ladrag.Gateway(embedding_dim=256)
    graph, index, report = ladrag.ingest_pre_extracted(
        "refdoc20", FIXTURES / "refdoc20" / "elements.json", gateway
    )
    assert report["warnings"] == []
    return graph, index, gateway


def test_graph_roundtrip():
    graph = ladrag.load_graph(FIXTURES / "two_node_graph.json")
    assert graph.node_count() == 2
    assert ladrag.validate_graph(graph) == []
    again = ladrag.graph_from_json(graph.to_json())
    assert again.to_json() == graph.to_json()


def test_louvain_bridge_partition(refdoc):
    graph, _, _ = refdoc
    assignment, modularity = ladrag.louvain_partition(graph)
    assert len(assignment) == graph.node_count()
    assert -0.5 <= modularity <= 1.0
    # The references section is one community.
    refs = {assignment[n] for n in ("p17_e0", "p17_e1", "p18_e0", "p19_e0")}
    assert len(refs) == 1


def test_query_and_contextualize(refdoc):
    graph, _, _ = refdoc
    figures = ladrag.execute_query(
        graph, {"filters": [{"field": "element_type", "in": ["figure"]}]}
    )
    assert figures == ["p2_e0"]

    cluster = ladrag.contextualize(graph, "p17_e0")
    assert cluster == ["p17_e0", "p17_e1", "p18_e0", "p19_e0"]

    with pytest.raises(ladrag.LadragError):
        ladrag.contextualize(graph, "p99_e0")


def test_search_paths(refdoc):
    graph, index, gateway = refdoc
    hits = ladrag.semantic_search(index, "crew survey morale", 3, gateway)
    assert len(hits) == 3
    assert hits[0][0].startswith("p10")

    bm25 = ladrag.build_bm25_index(graph)
    lexical = ladrag.bm25_search(bm25, "colophon typeset", 2)
    assert lexical[0][0] == "p20_e1"

    pages = ladrag.page_topk(hits, graph, 1)
    assert pages == [10]


def test_scripted_retrieve(refdoc):
    graph, index, gateway = refdoc
    script = json.loads((FIXTURES / "refdoc20" / "agent_script.json").read_text())
    gateway.set_script(script["responses"])
    result = ladrag.retrieve(
        "Which works are cited in Appendix A References of this report?",
        graph,
        index,
        gateway,
    )
    assert result["termination"] == "agent_finished"
    assert result["evidence_pages"] == [17, 18, 19]
    assert result["llm_calls"] == 3


def test_metrics():
    assert ladrag.perfect_recall({2, 5}, {1, 2, 5}) == 1
    assert ladrag.perfect_recall({2, 5}, {2}) == 0
    assert ladrag.irrelevant_pages_ratio({2, 5}, {1, 2, 5}) == pytest.approx(1 / 3)
