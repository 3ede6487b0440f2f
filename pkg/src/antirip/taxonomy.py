"""Closed taxonomy of piracy-post behaviours, verdicts, and label metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .errors import LengthMismatch
from .platform import PostRecord

TAXONOMY: dict[str, tuple[str, ...]] = {
    "InternalDistribution": ("direct_download", "channel_bot_routing"),
    "ExternalDistribution": ("cloud_storage", "streaming_magnet"),
    "ResilienceStrategies": (
        "dedicated_content_channel",
        "directory_index_channel",
        "backup_channel",
        "intermediary_routing",
    ),
    "FacilitatingAccess": (
        "vpn_proxy_mirror",
        "modded_app",
        "streaming_credentials",
        "access_tutorial",
    ),
    "BotCategories": (
        "content_delivery",
        "dynamic_retrieval",
        "channel_promotion",
        "content_ingestion",
    ),
    "CommunityGrowth": ("content_request", "channel_referral", "forced_join"),
    "Monetization": ("credit_purchase", "premium_tier", "incentivized_upload"),
    "PresentationAccessibility": ("resolution_encoding", "bundled_collection", "subtitles_dubs"),
}

PRIMARY_LAYER = ("InternalDistribution", "ExternalDistribution")

# Bot categories sit after the access groups; they only apply to bot authors.
DEFAULT_PRIORITY: tuple[str, ...] = (
    "InternalDistribution",
    "ExternalDistribution",
    "ResilienceStrategies",
    "FacilitatingAccess",
    "BotCategories",
    "Monetization",
    "CommunityGrowth",
    "PresentationAccessibility",
)

MAX_LABELS = 3

GROUP_OF: dict[str, str] = {leaf: g for g, leaves in TAXONOMY.items() for leaf in leaves}


@dataclass(frozen=True, order=True)
class TaxonomyLabel:
    group: str
    leaf: str

    def __post_init__(self):
        if self.leaf not in TAXONOMY.get(self.group, ()):
            raise ValueError(f"{self.leaf!r} is not a leaf of {self.group!r}")

    @classmethod
    def of(cls, leaf: str) -> "TaxonomyLabel":
        try:
            return cls(GROUP_OF[leaf], leaf)
        except KeyError:
            raise ValueError(f"unknown taxonomy leaf {leaf!r}") from None


def all_labels() -> list[TaxonomyLabel]:
    return [TaxonomyLabel(g, leaf) for g, leaves in TAXONOMY.items() for leaf in leaves]


def priority_key(priority: Sequence[str] = DEFAULT_PRIORITY):
    rank = {g: i for i, g in enumerate(priority)}

    def key(label: TaxonomyLabel) -> tuple[int, int]:
        return (rank.get(label.group, len(rank)), TAXONOMY[label.group].index(label.leaf))

    return key


def order_labels(
    labels: Iterable[TaxonomyLabel], priority: Sequence[str] = DEFAULT_PRIORITY
) -> list[TaxonomyLabel]:
    return sorted(set(labels), key=priority_key(priority))


@dataclass(frozen=True)
class AssignedLabel:
    label: TaxonomyLabel
    justification: str


@dataclass(frozen=True)
class PostVerdict:
    channel_id: str
    post_id: int
    is_piracy: bool
    labels: tuple[AssignedLabel, ...] = ()

    def __post_init__(self):
        if len(self.labels) > MAX_LABELS:
            raise ValueError("a verdict carries at most three labels")
        if not self.is_piracy and self.labels:
            raise ValueError("benign verdicts carry no labels")
        if len({a.label for a in self.labels}) != len(self.labels):
            raise ValueError("labels must be distinct")

    @property
    def primary_label(self) -> TaxonomyLabel | None:
        return self.labels[0].label if self.labels else None

    @property
    def secondary_labels(self) -> tuple[TaxonomyLabel, ...]:
        return tuple(a.label for a in self.labels[1:])

    @property
    def leaves(self) -> tuple[str, ...]:
        return tuple(a.label.leaf for a in self.labels)

    @property
    def key(self) -> tuple[str, int]:
        return (self.channel_id, self.post_id)

    def to_dict(self) -> dict:
        return {
            "channel_id": self.channel_id,
            "post_id": self.post_id,
            "is_piracy": self.is_piracy,
            "labels": [
                {"group": a.label.group, "leaf": a.label.leaf, "justification": a.justification}
                for a in self.labels
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PostVerdict":
        return cls(
            channel_id=d["channel_id"],
            post_id=int(d["post_id"]),
            is_piracy=bool(d["is_piracy"]),
            labels=tuple(
                AssignedLabel(TaxonomyLabel(x["group"], x["leaf"]), x.get("justification", ""))
                for x in d.get("labels", ())
            ),
        )


def truth_verdict(
    channel_id: str, post_id: int, is_piracy: bool, leaves: Sequence[str] = ()
) -> PostVerdict:
    """Build a reference verdict from leaf names (first leaf is primary)."""
    return PostVerdict(
        channel_id,
        post_id,
        is_piracy,
        tuple(AssignedLabel(TaxonomyLabel.of(leaf), "planted") for leaf in leaves),
    )


class ClassifierAdapter(Protocol):
    """Two-stage contract: ``categorize`` is only called after ``detect`` says yes."""

    def detect(self, post: PostRecord) -> bool: ...

    def categorize(self, post: PostRecord) -> PostVerdict: ...


@dataclass
class Metrics:
    n: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    primary: float
    primary_s1: float
    primary_s1_s2: float
    n_labelled: int = 0
    confusion: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "primary": self.primary,
            "primary_s1": self.primary_s1,
            "primary_s1_s2": self.primary_s1_s2,
            "n_labelled": self.n_labelled,
            "confusion": dict(self.confusion),
        }


def _ratio(num: int, den: int) -> float:
    # empty denominators are vacuously perfect
    return num / den if den else 1.0


def evaluate(verdicts: Sequence[PostVerdict], truth: Sequence[PostVerdict]) -> Metrics:
    """Detection metrics plus cumulative label accuracies.

    Label accuracies are computed over posts that are piracy in ``truth``.
    ``primary_s1`` requires the primary and the first secondary label to
    match in order; ``primary_s1_s2`` extends that to the first two, so the
    three figures are non-increasing by construction.
    """
    if len(verdicts) != len(truth):
        raise LengthMismatch(f"{len(verdicts)} verdicts vs {len(truth)} truth rows")
    tp = fp = tn = fn = 0
    labelled = hit_p = hit_s1 = hit_s2 = 0
    for v, t in zip(verdicts, truth):
        if v.is_piracy and t.is_piracy:
            tp += 1
        elif v.is_piracy:
            fp += 1
        elif t.is_piracy:
            fn += 1
        else:
            tn += 1
        if t.is_piracy:
            labelled += 1
            if v.primary_label == t.primary_label:
                hit_p += 1
                if v.secondary_labels[:1] == t.secondary_labels[:1]:
                    hit_s1 += 1
                    if v.secondary_labels[:2] == t.secondary_labels[:2]:
                        hit_s2 += 1
    n = len(truth)
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(
        n=n,
        accuracy=_ratio(tp + tn, n),
        precision=precision,
        recall=recall,
        f1=f1,
        primary=_ratio(hit_p, labelled),
        primary_s1=_ratio(hit_s1, labelled),
        primary_s1_s2=_ratio(hit_s2, labelled),
        n_labelled=labelled,
        confusion={"tp": tp, "fp": fp, "tn": tn, "fn": fn},
    )
