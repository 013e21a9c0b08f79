from collections import Counter

from nertc import annotate, textproc
from nertc.automaton import build_automaton
from nertc.corpus import OUT, validate_iob
from nertc.kb import TypePath


def make_sentence(text, doc_key="doc", index=0):
    return textproc.Sentence(doc_key, index, textproc.tokenize(text))


def entry_pairs(gaz):
    return [
        (surface, mid, gaz.entries[mid].resolved_type)
        for mid, entry in gaz.entries.items()
        for surface in entry.surfaces
    ]


class TestAnnotateSentence:
    def test_fixture_sentence_tags(self, gaz):
        automaton = build_automaton(entry_pairs(gaz))
        sent = make_sentence("Titanic , James Cameron tarafından yönetildi .")
        annotated = annotate.annotate_sentence(automaton, sent)
        assert annotated.tags == [
            "B-/film/film", "O", "B-/people/person", "I-/people/person", "O", "O", "O",
        ]

    def test_no_matches_all_out(self, gaz):
        automaton = build_automaton(entry_pairs(gaz))
        annotated = annotate.annotate_sentence(automaton, make_sentence("hiçbir eşleşme yok ."))
        assert annotated.tags == [OUT] * 4

    def test_punctuation_never_tagged(self, gaz):
        automaton = build_automaton(entry_pairs(gaz))
        annotated = annotate.annotate_sentence(automaton, make_sentence("Titanic , Titanic !"))
        assert [annotated.tags[i] for i, t in enumerate(annotated.tokens) if t.is_punct] == [OUT, OUT]

    def test_match_cannot_cross_punctuation(self):
        automaton = build_automaton([(("Galatasaray", "Spor"), "m.1", TypePath("a", "a"))])
        annotated = annotate.annotate_sentence(automaton, make_sentence("Galatasaray , Spor"))
        assert annotated.tags == [OUT, OUT, OUT]

    def test_leftmost_longest_overlap(self):
        automaton = build_automaton(
            [(("New", "York"), "m.1", TypePath("a", "a")), (("York", "City"), "m.2", TypePath("b", "b"))]
        )
        annotated = annotate.annotate_sentence(automaton, make_sentence("New York City"))
        assert annotated.tags == ["B-/a/a", "I-/a/a", OUT]


class TestAnnotateCpn:
    def test_titanic_article(self, snapshot, gaz, docs):
        sentences = annotate.annotate_cpn(snapshot, gaz, docs, "m.001")
        assert len(sentences) == 4
        assert all(s.domain == "film" for s in sentences)
        # second-order pass tagged Kapuskasing in the second sentence
        second = sentences[1]
        kap = second.texts().index("Kapuskasing")
        assert second.tags[kap] == "B-/location/citytown"

    def test_second_order_only_touches_out_tokens(self, snapshot, gaz, docs):
        docs_by_key = {d.article_key: d for d in docs}
        automaton_pairs = []
        for mid in ["m.001", "m.010", "m.020"]:
            entry = gaz.entries[mid]
            automaton_pairs.extend((s, mid, entry.resolved_type) for s in entry.surfaces)
        first_automaton = build_automaton(automaton_pairs)
        text = docs_by_key["a_titanic"].raw_text
        for index, raw in enumerate(textproc.split_sentences(text)):
            sent = textproc.Sentence("a_titanic", index, textproc.tokenize(raw))
            first_pass = annotate.annotate_sentence(first_automaton, sent)
            final = annotate.annotate_cpn(snapshot, gaz, docs, "m.001")[index]
            for before, after in zip(first_pass.tags, final.tags):
                if before != OUT:
                    assert after == before

    def test_description_fallback(self, snapshot, gaz, docs):
        sentences = annotate.annotate_cpn(snapshot, gaz, docs, "m.011")
        assert len(sentences) == 1
        assert sentences[0].doc_key == "desc:m.011"
        assert sentences[0].tags[0] == "B-/location/citytown"
        assert sentences[0].domain == "location"

    def test_no_text_skips(self, snapshot, gaz, docs):
        stats = {}
        assert annotate.annotate_cpn(snapshot, gaz, docs, "m.004", skip_stats=stats) == []
        assert stats == {"skipped_no_text": 1}

    def test_english_article_dropped(self, snapshot, gaz, docs):
        stats = {}
        assert annotate.annotate_cpn(snapshot, gaz, docs, "m.020", skip_stats=stats) == []
        assert stats == {"skipped_language": 1}

    def test_domain_tie_prefers_cpn_domain(self, snapshot, gaz, docs):
        # sentence 1: one film entity + one people entity, CPN domain film
        sentences = annotate.annotate_cpn(snapshot, gaz, docs, "m.001")
        first = sentences[0]
        domains = Counter(t.split("/")[1] for _s, _e, t in first.spans())
        assert domains == {"film": 1, "people": 1}
        assert first.domain == "film"


class TestAnnotateCorpus:
    def test_matches_golden(self, snapshot, gaz, docs, golden_fga):
        result = annotate.annotate_corpus(snapshot, gaz, docs)
        assert len(result) == len(golden_fga) == 9
        for ours, golden in zip(result.sentences, golden_fga.sentences):
            assert ours.texts() == golden.texts()
            assert ours.tags == golden.tags
            assert ours.domain == golden.domain

    def test_shared_article_deduplicated(self, snapshot, gaz, docs):
        # m.001 and m.010 share a_titanic; its four sentences appear once,
        # kept from the pivot that tagged more tokens (m.001).
        result = annotate.annotate_corpus(snapshot, gaz, docs)
        titanic = [s for s in result.sentences if s.doc_key == "a_titanic"]
        assert len(titanic) == 4
        assert all(s.domain == "film" for s in titanic)

    def test_skip_counters_in_provenance(self, snapshot, gaz, docs):
        result = annotate.annotate_corpus(snapshot, gaz, docs)
        assert result.provenance["skipped_no_text"] == 1
        assert result.provenance["skipped_language"] == 1

    def test_empty_dump(self, snapshot, gaz):
        # Entities with descriptions still contribute; strip them too.
        result = annotate.annotate_corpus(snapshot, gaz, [])
        assert all(s.doc_key.startswith("desc:") for s in result.sentences)

    def test_valid_iob_everywhere(self, snapshot, gaz, docs):
        result = annotate.annotate_corpus(snapshot, gaz, docs)
        for sent in result.sentences:
            validate_iob(sent.tags)

    def test_assigned_domain_is_argmax(self, snapshot, gaz, docs):
        for sent in annotate.annotate_corpus(snapshot, gaz, docs).sentences:
            counts = Counter(t.split("/")[1] for _s, _e, t in sent.spans())
            if counts:
                assert counts[sent.domain] == max(counts.values())

    def test_fold_case_matches_lowercased_mentions(self, snapshot, docs):
        from nertc import gazetteer as gazmod

        folded_gaz = gazmod.build_gazetteer(snapshot, fold_case=True)
        automaton = build_automaton(
            [
                (surface, mid, folded_gaz.entries[mid].resolved_type)
                for mid, entry in folded_gaz.entries.items()
                for surface in entry.surfaces
            ]
        )
        sent = make_sentence("ANKARA büyüdü .")
        annotated = annotate.annotate_sentence(automaton, sent, fold_case=True)
        assert annotated.tags[0] == "B-/location/citytown"
        # without query folding the uppercased mention cannot match
        plain = annotate.annotate_sentence(automaton, sent, fold_case=False)
        assert plain.tags[0] == OUT

    def test_parallel_jobs_deterministic(self, snapshot, gaz, docs):
        serial = annotate.annotate_corpus(snapshot, gaz, docs, jobs=1)
        parallel = annotate.annotate_corpus(snapshot, gaz, docs, jobs=4)
        assert [s.tags for s in serial.sentences] == [s.tags for s in parallel.sentences]
        assert [s.domain for s in serial.sentences] == [s.domain for s in parallel.sentences]
        assert serial.provenance == parallel.provenance
