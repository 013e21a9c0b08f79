import json

from nertc import stats
from nertc.corpus import OUT, AnnotatedCorpus, AnnotatedSentence, tokens_from_texts


def test_golden_fga_report_matches_frozen_json(golden_fga, golden_dir):
    report = stats.compute_stats(golden_fga)
    frozen = json.loads((golden_dir / "stats_fga.json").read_text(encoding="utf-8"))
    assert report.to_dict() == frozen


def test_golden_cga_di_report_matches_frozen_json(golden_cga_di, golden_dir):
    report = stats.compute_stats(golden_cga_di)
    frozen = json.loads((golden_dir / "stats_cga_di.json").read_text(encoding="utf-8"))
    assert report.to_dict() == frozen


def test_fixture_headline_numbers(golden_fga):
    report = stats.compute_stats(golden_fga)
    assert report.sentences == 9
    assert set(report.domain_sentences) == {"film", "location", "organization"}
    assert report.to_dict()["domain_most_sentences"] == ["film", 4]
    assert report.unique_types == 5


def test_empty_corpus_all_zero():
    report = stats.compute_stats(AnnotatedCorpus())
    data = report.to_dict()
    assert data["sentences"] == 0
    assert data["tagged_tokens"] == 0
    assert data["domain_most_sentences"] is None
    assert data["coarse_label_tokens"] is None


def test_single_tagged_token():
    sent = AnnotatedSentence("d", 0, tokens_from_texts(["Ankara"]), ["B-/location/citytown"], "location")
    report = stats.compute_stats(AnnotatedCorpus([sent]))
    assert (report.sentences, report.tagged_tokens, report.unique_types) == (1, 1, 1)


def test_domain_sentence_counts_sum_to_total(golden_fga):
    report = stats.compute_stats(golden_fga)
    assert sum(report.domain_sentences.values()) == report.sentences


def test_token_count_ordering(golden_fga):
    report = stats.compute_stats(golden_fga)
    assert report.tagged_tokens <= report.tokens_without_punct <= report.tokens_with_punct


def test_coarse_label_tokens_sum_to_tagged(golden_cga_di):
    report = stats.compute_stats(golden_cga_di)
    assert report.coarse_label_tokens is not None
    assert sum(report.coarse_label_tokens.values()) == report.tagged_tokens


def test_iob_prefixes_do_not_double_types():
    sent = AnnotatedSentence(
        "d", 0,
        tokens_from_texts(["James", "Cameron", "geldi"]),
        ["B-/people/person", "I-/people/person", OUT],
        "people",
    )
    report = stats.compute_stats(AnnotatedCorpus([sent]))
    assert report.unique_types == 1
    assert report.tagged_tokens == 2


def test_table_layout_smoke(golden_fga):
    table = stats.format_table(stats.compute_stats(golden_fga))
    assert "# of Sentences" in table
    assert "film (4)" in table
