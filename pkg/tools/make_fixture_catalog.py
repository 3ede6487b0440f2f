"""Regenerate src/antirip/data/catalog_fixture.jsonl (500 invented titles plus a few real anchors)."""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "antirip" / "data" / "catalog_fixture.jsonl"

ADJ = """crimson silent hollow golden broken distant wild hidden frozen burning
scarlet velvet iron lonely bright restless quiet savage gentle shattered
midnight electric forgotten copper emerald northern southern painted
sunken crooked lucky brave endless final""".split()
NOUN = """harbor orchard river kingdom garden tower shadow empire lantern
mirror storm valley island bridge voyage letter promise circuit falcon
meadow canyon signal compass horizon thunder anthem ember glacier
cathedral carnival frontier lighthouse harvest labyrinth monsoon
nebula orbit prairie quarry reef saga tundra vortex willow""".split()
NAMES = """Mara Elias Juno Tobias Ines Casper Leona Hugo Nadia Oskar Priya
Rafael Selma Viktor Yara Zane""".split()
INVENTED = """Zephyria Quellmoor Ostravia Brennhaven Calyxa Dunmarrow Evenfall
Glimmerdeep Halcyra Isenvale Korrindor Lumenhold Myrtlegrove Nocturna
Pyrrhic Solvenna Thalassa Umbravel Varnholt Wrenhaven""".split()

COMPANIES = [
    ("Northwind Pictures", "US"),
    ("Bluefin Studios", "US"),
    ("Harborlight Television", "US"),
    ("Ironbridge Entertainment", "US"),
    ("Kestrel Films", "GB"),
    ("Sakura Animation", "JP"),
    ("Hanul Media", "KR"),
    ("Lumiere Rouge", "FR"),
    ("Ganges Talkies", "IN"),
    ("Jade River Pictures", "CN"),
    ("Sierra Norte Cine", "ES"),
    ("Rheinlicht Film", "DE"),
]


def main() -> None:
    rng = random.Random(1980)
    seen = set()
    rows = [
        {"title": "The Office", "year": 2001, "kind": "tv", "companies": ["BBC Two"], "countries": ["GB"]},
        {"title": "The Office", "year": 2005, "kind": "tv", "companies": ["NBC"], "countries": ["US"]},
        {"title": "Love Actually", "year": 2003, "kind": "movie", "companies": ["Kestrel Films"], "countries": ["GB"]},
        {"title": "Love", "year": 2015, "kind": "movie", "companies": ["Lumiere Rouge"], "countries": ["FR"]},
        {"title": "Home", "year": 2009, "kind": "movie", "companies": ["Lumiere Rouge"], "countries": ["FR"]},
        {"title": "You", "year": 2018, "kind": "tv", "companies": ["Harborlight Television"], "countries": ["US"]},
    ]
    seen.update(r["title"].lower() for r in rows)
    while len(rows) < 500:
        form = rng.random()
        if form < 0.35:
            title = f"The {rng.choice(ADJ).title()} {rng.choice(NOUN).title()}"
        elif form < 0.55:
            title = f"{rng.choice(NOUN).title()} of {rng.choice(NOUN).title()}"
        elif form < 0.75:
            title = f"{rng.choice(ADJ).title()} {rng.choice(NOUN).title()}"
        elif form < 0.87:
            title = f"{rng.choice(NAMES)}'s {rng.choice(NOUN).title()}"
        elif form < 0.95:
            title = rng.choice(INVENTED)
        else:
            title = f"{rng.choice(INVENTED)} {rng.choice(NOUN).title()}"
        if title.lower() in seen:
            continue
        seen.add(title.lower())
        company, country = rng.choice(COMPANIES)
        # roughly 4% predate the catalog cut-off
        year = rng.randint(1960, 1979) if rng.random() < 0.04 else rng.randint(1980, 2025)
        rows.append(
            {
                "title": title,
                "year": year,
                "kind": "tv" if rng.random() < 0.3 else "movie",
                "companies": [company],
                "countries": [country],
            }
        )
    with OUT.open("w", encoding="utf-8") as fh:
        for i, row in enumerate(rows, start=1):
            row = {"id": f"t{i:04d}", "alt_titles": [], **row}
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    print(f"wrote {len(rows)} entries to {OUT}")


if __name__ == "__main__":
    main()
