from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from antirip.errors import LengthMismatch, NoLabelMatch
from antirip.platform import InternalLink, PostRecord
from antirip.rules import RuleClassifier, classify_post, classify_posts
from antirip.sim import generate_post_corpus
from antirip.taxonomy import (
    DEFAULT_PRIORITY,
    TAXONOMY,
    AssignedLabel,
    PostVerdict,
    TaxonomyLabel,
    all_labels,
    evaluate,
    order_labels,
    truth_verdict,
)

GB = 1024**3


def post(text="", **kw):
    return PostRecord("c0001", kw.pop("post_id", 1), 0, text, **kw)


def test_taxonomy_shape():
    assert len(all_labels()) == sum(len(v) for v in TAXONOMY.values())
    assert set(DEFAULT_PRIORITY) == set(TAXONOMY)
    with pytest.raises(ValueError):
        TaxonomyLabel("ExternalDistribution", "direct_download")


def test_verdict_invariants():
    lab = lambda leaf: AssignedLabel(TaxonomyLabel.of(leaf), "")
    with pytest.raises(ValueError):
        PostVerdict("c", 1, False, (lab("direct_download"),))
    with pytest.raises(ValueError):
        PostVerdict("c", 1, True, tuple(lab(x) for x in ("direct_download", "cloud_storage", "modded_app", "premium_tier")))
    with pytest.raises(ValueError):
        PostVerdict("c", 1, True, (lab("direct_download"), lab("direct_download")))
    v = PostVerdict("c", 1, True, (lab("cloud_storage"), lab("subtitles_dubs")))
    assert PostVerdict.from_dict(v.to_dict()) == v


def test_detect_examples():
    r = RuleClassifier()
    assert r.detect(post("The Long Night (2019) 1080p", attachment=("long.night.2019.mkv", 2 * GB)))
    assert not r.detect(post(""))
    assert not r.detect(post("Silent Reef trailer is out, what a film"))


def test_categorize_examples(reference_text):
    r = RuleClassifier()
    v = r.categorize(post("The Long Night (2019) 1080p", attachment=("long.night.2019.mkv", 2 * GB)))
    assert v.primary_label.leaf == "direct_download"
    v = r.categorize(post("Get it: https://terabox.com/s/abc 720p|1080p"))
    assert set(v.leaves) == {"cloud_storage", "resolution_encoding"}
    assert v.primary_label.leaf == "cloud_storage"
    v = r.categorize(post("join our backup channel t.me/x_backup"))
    assert set(v.leaves) == {"backup_channel", "channel_referral"}
    assert "TeraBox" in reference_text
    with pytest.raises(NoLabelMatch):
        r.categorize(post("hello there"))


def test_bot_categories_only_for_bots():
    text = "Here is your file: Long Night 1080p"
    as_channel = RuleClassifier().classify(post(text, attachment=("ln.mkv", GB)))
    as_bot = RuleClassifier(bot_ids=frozenset({"c0001"})).classify(post(text, attachment=("ln.mkv", GB)))
    assert "content_delivery" not in as_channel.leaves
    assert "content_delivery" in as_bot.leaves


def test_priority_is_configurable():
    text = "Download now 1080p https://terabox.com/s/abc"
    default = RuleClassifier().categorize(post(text))
    flipped = RuleClassifier(priority=tuple(reversed(DEFAULT_PRIORITY))).categorize(post(text))
    assert default.primary_label.leaf == "cloud_storage"
    assert flipped.primary_label.group == "PresentationAccessibility"


def test_classify_post_never_labels_benign():
    v = classify_post(RuleClassifier(), post("good morning everyone"))
    assert v == PostVerdict("c0001", 1, False)


def test_order_labels_follows_priority():
    labs = [TaxonomyLabel.of(x) for x in ("subtitles_dubs", "forced_join", "direct_download", "modded_app")]
    out = order_labels(labs)
    assert [x.leaf for x in out] == ["direct_download", "modded_app", "forced_join", "subtitles_dubs"]


def test_categorize_caps_at_three():
    text = "Download 1080p dual audio, complete season pack, join t.me/films_backup1 backup, modded apk"
    v = RuleClassifier().categorize(post(text, attachment=("pack.mkv", GB)))
    assert len(v.labels) == 3


def test_evaluate_trivial_cases():
    truth = [truth_verdict("c", i, True, ["direct_download"]) for i in range(4)]
    m = evaluate(truth, truth)
    assert m.accuracy == m.precision == m.recall == m.primary == m.primary_s1_s2 == 1.0
    benign = [PostVerdict("c", i, False) for i in range(4)]
    assert evaluate(benign, truth).recall == 0.0
    with pytest.raises(LengthMismatch):
        evaluate(benign[:2], truth)


leaves = st.lists(st.sampled_from(sorted(l.leaf for l in all_labels() if l.group != "BotCategories")),
                  min_size=1, max_size=3, unique=True)
verdict_pair = st.tuples(st.booleans(), leaves, st.booleans(), leaves)


@settings(max_examples=200, deadline=None)
@given(st.lists(verdict_pair, min_size=1, max_size=30))
def test_cumulative_accuracy_monotone(rows):
    v = [truth_verdict("c", i, a, la if a else []) for i, (a, la, _, _) in enumerate(rows)]
    t = [truth_verdict("c", i, b, lb if b else []) for i, (_, _, b, lb) in enumerate(rows)]
    m = evaluate(v, t)
    assert m.primary >= m.primary_s1 >= m.primary_s1_s2


def test_rule_engine_is_pure():
    posts, _, bots = generate_post_corpus(200, seed=3)
    r = RuleClassifier(bot_ids=bots)
    assert classify_posts(r, posts) == classify_posts(r, posts)
    assert classify_posts(r, posts) == [r.classify(p) for p in reversed(posts)][::-1]


def test_corpus_accuracy_small():
    posts, truth, bots = generate_post_corpus(300, benign_fraction=0.5, seed=11)
    m = evaluate(classify_posts(RuleClassifier(bot_ids=bots), posts), truth)
    assert m.accuracy >= 0.95
    assert m.primary >= 0.90


def test_link_only_post_with_referral():
    p = post("Join t.me/movies_backup_hd to download new movies daily",
             internal_links=(InternalLink("channel", "movies_backup_hd"),))
    assert RuleClassifier().detect(p)
