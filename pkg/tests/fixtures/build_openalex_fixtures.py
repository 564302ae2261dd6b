"""Regenerate the hand-written OpenAlex replay fixtures.

Run from the repository root: ``python3 tests/fixtures/build_openalex_fixtures.py``.
"""
import json
import os

from interdiv.openalex import WORK_FIELDS, WORKS_URL, request_key

HERE = os.path.join(os.path.dirname(__file__), "openalex")
MEDICINE = "C71924100"


def concept(cid, name, score, level=0):
    return {"id": f"https://openalex.org/{cid}", "display_name": name, "level": level, "score": score}


def sdg(n, score):
    return {"id": f"https://metadata.un.org/sdg/{n}", "display_name": f"Goal {n}", "score": score}


def work(wid, cites, concepts, sdgs, year=2000):
    return {
        "id": f"https://openalex.org/{wid}",
        "publication_year": year,
        "cited_by_count": cites,
        "concepts": concepts,
        "sustainable_development_goals": sdgs,
    }


PAGE1 = [
    work("W100", 900, [concept(MEDICINE, "Medicine", 0.9), concept("C86803240", "Biology", 0.4),
                       concept("C185592680", "Chemistry", 0.2), concept("C999", "Oncology", 0.7, level=1)],
         [sdg(3, 0.8), sdg(6, 0.3)]),
    work("W101", 700, [concept(MEDICINE, "Medicine", 0.6)], [sdg(3, 0.55)]),
    work("W102", 650, [concept(MEDICINE, "Medicine", 0.5), concept("C15744967", "Psychology", 0.45)], []),
]
PAGE2 = [
    work("W103", 400, [concept(MEDICINE, "Medicine", 0.3)], []),
    work("W104", 400, [concept(MEDICINE, "Medicine", 0.35), concept("C41008148", "Computer science", 0.5)],
         [sdg(9, 0.6)]),
    work("W105", 12, [], None),
]


def works_params(year, cursor, per_page=3):
    return {
        "filter": f"concepts.id:{MEDICINE},publication_year:{year}",
        "sort": "cited_by_count:desc",
        "per_page": per_page,
        "select": WORK_FIELDS,
        "cursor": cursor,
    }


def dump(params, body, status=200, headers=None):
    doc = {"request": {"url": WORKS_URL, "params": params}, "status": status,
           "headers": headers or {}, "body": body}
    with open(os.path.join(HERE, request_key(WORKS_URL, params) + ".json"), "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def main():
    os.makedirs(HERE, exist_ok=True)
    dump(works_params(2000, "*"), {"meta": {"count": 6, "next_cursor": "c2"}, "results": PAGE1})
    dump(works_params(2000, "c2"), {"meta": {"count": 6, "next_cursor": "c3"}, "results": PAGE2})
    dump(works_params(2000, "c3"), {"meta": {"count": 6, "next_cursor": None}, "results": []})
    dump(works_params(1971, "*"), {"meta": {"count": 0, "next_cursor": None}, "results": []})

    # term prevalence, 2020: overall 5 of 50, domains d -> (d, 10 * d)
    from interdiv.openalex import TERM_SEARCH
    for domain, (count, total) in {None: (5, 50), 1: (1, 10), 2: (2, 20), 3: (3, 30), 4: (0, 40)}.items():
        base = ["publication_year:2020"] + ([] if domain is None else [f"primary_topic.domain.id:{domain}"])
        dump({"filter": ",".join(base), "per_page": 1}, {"meta": {"count": total}, "results": []})
        dump({"filter": ",".join(base + [f"title_and_abstract.search:{TERM_SEARCH}"]), "per_page": 1},
             {"meta": {"count": count}, "results": []})


if __name__ == "__main__":
    main()
