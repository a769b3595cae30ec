#!/usr/bin/env python3
"""Writes the recorded Olinda-shaped payloads used by the ingestion tests.

Rows are the published survey medians for the first and last collection
dates of the 2004-2025 sample. Each indicator file is the full response body
for that indicator; the test server pages it according to $top/$skip.
"""
import json
import pathlib
import sys

COLUMNS = ["IPCA", "Selic", "PIB", "Primario", "Nominal"]
API_NAMES = {
    "IPCA": "IPCA",
    "Selic": "Selic",
    "PIB": "PIB Total",
    "Primario": "Resultado primário",
    "Nominal": "Resultado nominal",
}

ROWS = """
02/01/2004 6.00 5.00 4.50 4.00 13.85 13.00 12.00 11.50 3.66 3.66 3.66 3.66 4.25 4.25 4.00 3.75 -3.00 -2.35 -2.50 -2.20
05/01/2004 6.00 5.00 4.50 4.00 13.85 13.00 12.00 11.50 3.72 3.72 3.72 3.72 4.25 4.23 4.00 3.75 -3.00 -2.50 -2.50 -2.50
06/01/2004 6.00 5.00 4.50 4.00 13.85 13.00 12.00 11.50 3.66 3.66 3.66 3.66 4.25 4.25 4.00 3.75 -3.00 -2.45 -2.50 -2.15
07/01/2004 6.00 5.00 4.50 4.00 13.85 13.00 12.00 11.50 3.60 3.60 3.60 3.60 4.25 4.25 4.00 3.75 -3.00 -2.30 -2.30 -2.13
18/12/2025 4.35 4.09 3.80 3.50 15.00 12.00 10.50 9.50 1.80 1.80 1.80 1.80 -0.50 -0.60 -0.40 -0.12 -8.43 -8.66 -7.84 -7.20
19/12/2025 4.33 4.06 3.80 3.50 15.00 12.25 10.50 9.75 1.80 1.80 1.80 1.80 -0.50 -0.60 -0.34 -0.16 -8.43 -8.70 -7.85 -7.00
22/12/2025 4.33 4.06 3.80 3.50 15.00 12.25 10.50 10.00 1.80 1.80 1.80 1.80 -0.50 -0.59 -0.35 -0.18 -8.43 -8.61 -7.90 -7.00
23/12/2025 4.33 4.06 3.80 3.50 15.00 12.25 10.50 10.00 1.80 1.80 1.80 1.80 -0.50 -0.59 -0.35 -0.18 -8.43 -8.61 -7.90 -7.00
24/12/2025 4.33 4.06 3.80 3.50 15.00 12.25 10.50 10.00 1.80 1.80 1.80 1.80 -0.50 -0.59 -0.35 -0.18 -8.47 -8.61 -7.90 -7.00
26/12/2025 4.32 4.05 3.80 3.50 15.00 12.25 10.50 9.75 1.80 1.80 1.80 1.80 -0.50 -0.56 -0.35 -0.18 -8.43 -8.61 -7.90 -7.00
"""

CONTEXT = ("https://olinda.bcb.gov.br/olinda/servico/Expectativas/versao/v1/odata/"
           "$metadata#ExpectativasMercadoAnuais(Indicador,Data,DataReferencia,Mediana,baseCalculo)")


def records():
    out = {c: [] for c in COLUMNS}
    for line in ROWS.strip().splitlines():
        parts = line.split()
        d, m, y = parts[0].split("/")
        iso = f"{y}-{m}-{d}"
        values = parts[1:]
        for i, col in enumerate(COLUMNS):
            for h in range(4):
                out[col].append({
                    "Indicador": API_NAMES[col],
                    "Data": iso,
                    "DataReferencia": str(int(y) + h),
                    "Mediana": float(values[4 * i + h]),
                    "baseCalculo": 0,
                })
    return out


def dump(path, body):
    path.write_text(json.dumps(body, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def main(out_dir):
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    recs = records()
    for col in COLUMNS:
        dump(out_dir / f"{col}.json", {"@odata.context": CONTEXT, "value": recs[col]})

    # One IPCA survey day, plus the baseCalculo = 1 twin the service also
    # publishes (must be ignored).
    first = [r for r in recs["IPCA"] if r["Data"] == "2004-01-02" and r["DataReferencia"] == "2004"]
    twin = dict(first[0], baseCalculo=1, Mediana=6.10)
    dump(out_dir / "single_ipca.json", {"@odata.context": CONTEXT, "value": first + [twin]})

    dump(out_dir / "empty.json", {"@odata.context": CONTEXT, "value": []})

    bad = [dict(r) for r in recs["IPCA"][:3]]
    bad[1]["Mediana"] = "6,00"
    dump(out_dir / "malformed.json", {"@odata.context": CONTEXT, "value": bad})

    dup = [dict(r) for r in recs["IPCA"][:4]]
    dup.append(dict(recs["IPCA"][0], Mediana=6.05))
    dump(out_dir / "duplicates.json", {"@odata.context": CONTEXT, "value": dup})

    stale = [dict(recs["IPCA"][4], DataReferencia="2003")]
    dump(out_dir / "stale_reference.json", {"@odata.context": CONTEXT, "value": stale})


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parents[2] / "tests/fixtures/focus")
