"""Regenerates the persona fixture JSONL files in ./persona/.

Run from this directory: python3 generate_persona.py
"""
import datetime
import json
import os

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "persona")

SINGH = "orcid:0000-0002-1000-0001"
ALJAMIL = "orcid:0000-0003-2000-0002"

SINGH_OBJ = "doi:10.5061/dryad.singh-longitudinal"
SINGH_PILOT = "doi:10.5061/dryad.singh-pilot"
IMAGING = "doi:10.5281/zenodo.consortium-imaging"
GENOMICS = "doi:10.5281/zenodo.consortium-genomics"


def dump(path, rows):
    with open(os.path.join(OUT, path), "w") as f:
        for r in rows:
            f.write(json.dumps(r, separators=(",", ":"), sort_keys=False) + "\n")


def contributor(rid, inst, name=None):
    c = {"researcher_id": rid, "institution_id": inst}
    if name:
        c["name"] = name
    return c


def metadata(**kw):
    base = {
        "identifier_scheme": "doi",
        "description_chars": 1200,
        "keywords": ["cohort", "longitudinal", "physiology", "open data"],
        "license_id": "CC-BY-4.0",
        "access_url": "https://datadryad.org/",
        "access_protocol": "https",
        "formats": ["text/csv"],
        "uses_standard_schema": True,
        "has_provenance": True,
        "completeness_ratio": 0.9,
    }
    base.update(kw)
    return base


objects = []
objects.append({
    "schema": "qic.data_object.v1",
    "id": SINGH_OBJ,
    "title": "Thirty-year longitudinal cohort of cardiovascular physiology",
    "repository": "dryad",
    "published": "2018-09-14",
    "contributors": [
        contributor(SINGH, "ror:00cvxb145", "Dr. Singh"),
        contributor("orcid:0000-0002-1000-0011", "ror:00cvxb145"),
        contributor("orcid:0000-0002-1000-0012", "ror:00cvxb145"),
        contributor("orcid:0000-0002-1000-0013", "ror:00cvxb145"),
    ],
    "metadata": metadata(),
})
objects.append({
    "schema": "qic.data_object.v1",
    "id": SINGH_PILOT,
    "title": "Pilot recordings",
    "repository": "dryad",
    "published": "2016-02-01",
    "contributors": [
        contributor(SINGH, "ror:00cvxb145", "Dr. Singh"),
        contributor("orcid:0000-0002-1000-0011", "ror:00cvxb145"),
    ],
    "metadata": metadata(description_chars=80, keywords=["pilot"], formats=["application/vnd.ms-excel"],
                         uses_standard_schema=False, has_provenance=False, completeness_ratio=0.5),
})

consortium_insts = ["ror:01an7q238", "ror:00f54p054", "ror:03vek6s52", "ror:05a28rw58",
                    "ror:02jzgtq86", "ror:013meh722", "ror:04xs57h96"]


def consortium(oid, title, n_authors, n_insts, published, extra_meta):
    contribs = [contributor(ALJAMIL, consortium_insts[0], "Dr. Al-Jamil")]
    for k in range(1, n_authors):
        contribs.append(contributor(f"orcid:0000-0004-{3000 + k:04d}-{k:04d}",
                                    consortium_insts[k % n_insts]))
    return {
        "schema": "qic.data_object.v1",
        "id": oid,
        "title": title,
        "repository": "zenodo",
        "published": published,
        "contributors": contribs,
        "metadata": metadata(**extra_meta),
        "consortium": "Multi-site Developmental Imaging Consortium",
    }


objects.append(consortium(IMAGING, "Multi-site neonatal imaging atlas", 12, 6, "2024-04-02",
                          {"formats": ["application/x-netcdf"], "access_url": "https://zenodo.org/",
                           "completeness_ratio": 0.8}))
objects.append(consortium(GENOMICS, "Consortium harmonized genomics panel", 15, 7, "2024-11-20",
                          {"formats": ["application/x-parquet", "text/tab-separated-values"],
                           "access_url": "https://zenodo.org/", "completeness_ratio": 0.85}))

events = []
start = datetime.date(2019, 1, 7)


def ev(oid, kind, src, day, weight=None):
    e = {"schema": "qic.reuse_event.v1", "data_object_id": oid, "kind": kind, "source_id": src,
         "occurred": day.isoformat()}
    if weight is not None:
        e["weight_override"] = weight
    return e


for k in range(400):
    day = start + datetime.timedelta(days=(k * 37) % 2400)
    events.append(ev(SINGH_OBJ, "citation", f"doi:10.1000/citing.{k + 1:04d}", day))
for k in range(12):
    day = start + datetime.timedelta(days=200 + k * 150)
    events.append(ev(SINGH_OBJ, "derived_dataset", f"doi:10.5061/dryad.derived-{k + 1:02d}", day))
for k in range(40):
    day = start + datetime.timedelta(days=(k * 53) % 2300)
    events.append(ev(SINGH_OBJ, "mention", f"url:https://news.example.org/item/{k + 1}", day))
for k in range(20):
    day = start + datetime.timedelta(days=90 * k)
    events.append(ev(SINGH_OBJ, "download_batch", "usage:dryad-monthly", day))

events.append(ev(IMAGING, "mention", "url:https://consortium.example.org/news/atlas-release",
                 datetime.date(2025, 3, 10)))
events.append(ev(GENOMICS, "download_batch", "usage:zenodo-monthly", datetime.date(2025, 5, 2)))

overrides = [
    {"schema": "qic.curator_override.v1", "object_id": SINGH_OBJ, "dimension": "R", "value": 1.0,
     "curator_id": "orcid:0000-0001-9000-0001", "timestamp": "2024-02-11T09:30:00Z",
     "note": "codebook and provenance verified"},
    {"schema": "qic.curator_override.v1", "object_id": IMAGING, "dimension": "I", "value": 0.9,
     "curator_id": "orcid:0000-0001-9000-0002", "timestamp": "2024-06-01T12:00:00Z"},
    {"schema": "qic.curator_override.v1", "object_id": IMAGING, "dimension": "I", "value": 1.0,
     "curator_id": "orcid:0000-0001-9000-0001", "timestamp": "2024-09-15T08:00:00Z"},
]

os.makedirs(OUT, exist_ok=True)
dump("objects.jsonl", objects)
dump("events.jsonl", events)
dump("overrides.jsonl", overrides)
