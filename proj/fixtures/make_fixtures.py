#!/usr/bin/env python3
"""Regenerates the checked-in fixture corpus and external data files.

Outputs are committed; rerunning with the same seed reproduces them
byte for byte. The feed XML and registry use the literal placeholder
{PORT} so tests can serve the corpus from an ephemeral port.
"""

import os
import random
from email.utils import format_datetime
from datetime import datetime, timedelta, timezone

ROOT = os.path.dirname(os.path.abspath(__file__))
rng = random.Random(20200404)

COVID_SENTENCES = [
    "County health officials reported {n} new coronavirus cases on {day}, bringing the local total higher as testing expanded at the fairgrounds site.",
    "The hospital said its covid unit remained busy, and nurses urged residents to keep wearing masks and practicing social distancing in indoor spaces.",
    "School administrators weighed new quarantine rules after several staff members tested positive for covid-19 following the holiday weekend.",
    "The state reported a rise in covid hospitalizations, and the county emergency manager asked churches to move services outdoors again.",
    "Local restaurants adjusted to the pandemic with expanded patio seating while owners waited for word on another round of relief grants.",
    "Vaccine planning continued as pharmacists outlined how doses would be stored and which groups would be first in line under the state plan.",
    "Contact tracing teams said the latest outbreak traced back to a packed indoor gathering, and they asked attendees to isolate at home.",
    "The sars-cov-2 positivity rate in the county ticked up to {pct} percent, according to the weekly report from the health department.",
]

PLAIN_SENTENCES = [
    "The council voted {n} to 2 on Tuesday to fund repaving along the highway spur, citing years of complaints about potholes from commuters.",
    "The varsity team beat its county rival {n} to 3 on Friday night behind a strong pitching performance and two late home runs.",
    "Organizers said the harvest festival will return to the square with a parade, a bake sale, and live music from three local bands.",
    "The school board approved a new bus route map after parents raised concerns about long walks along the state road without sidewalks.",
    "Firefighters contained a grass fire near the reservoir on {day} afternoon, and no structures were damaged according to the chief.",
    "The library announced extended evening hours and a reading program for students, funded by a grant from the community foundation.",
    "Farmers said the dry spell has stressed the corn crop, though weekend rain brought some relief to fields in the northern townships.",
    "A new hardware store opened downtown, filling a storefront that sat empty for two years, and the owner plans to hire four clerks.",
    "The planning commission reviewed a proposal for {n} new houses on the old dairy site, with a public hearing set for next month.",
    "Deputies said the stolen truck was recovered near the county line, and one suspect was arraigned in district court on Monday.",
]

DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]


def sentence(pool):
    s = rng.choice(pool)
    return s.format(n=rng.randint(4, 40), day=rng.choice(DAYS), pct=rng.randint(2, 15))


def article_body(covid):
    main_pool = COVID_SENTENCES if covid else PLAIN_SENTENCES
    n_par = rng.randint(3, 5)
    paragraphs = []
    for p in range(n_par):
        pool = main_pool if (p == 0 or rng.random() < (0.7 if covid else 0.95)) else PLAIN_SENTENCES
        paragraphs.append(" ".join(sentence(pool) for _ in range(rng.randint(2, 3))))
    return paragraphs


def page_html(title, paragraphs):
    body = "\n".join(f"<p>{p}</p>" for p in paragraphs)
    return f"""<html><head><title>{title}</title><meta charset="utf-8"></head>
<body>
<nav><a href="/">Home</a> <a href="/news">News</a> <a href="/sports">Sports</a> <a href="/obits">Obituaries</a></nav>
<header class="masthead"><h1>The Fixture Times</h1></header>
<article>
<h1>{title}</h1>
{body}
</article>
<aside class="sidebar"><h3>Most read</h3><a href="/1">One</a> <a href="/2">Two</a></aside>
<footer>Subscribe | Contact | Privacy</footer>
</body></html>
"""


def make_outlet(outlet, n_articles, covid_share, start_week, end_week):
    os.makedirs(f"{ROOT}/corpus/pages/{outlet}", exist_ok=True)
    items = []
    anchor = datetime(2020, 1, 1, tzinfo=timezone.utc)
    for i in range(n_articles):
        covid = rng.random() < covid_share
        week = rng.randint(start_week, end_week)
        published = anchor + timedelta(days=week * 7 + rng.randint(0, 6),
                                       hours=rng.randint(6, 21), minutes=rng.randint(0, 59))
        title_word = "Coronavirus update" if covid else rng.choice(
            ["Council notes", "Game recap", "Around town", "School news", "Business brief"])
        title = f"{title_word} no. {i}"
        paragraphs = article_body(covid)
        with open(f"{ROOT}/corpus/pages/{outlet}/{i}.html", "w") as f:
            f.write(page_html(title, paragraphs))
        items.append((i, title, published))

    xml = ['<?xml version="1.0" encoding="UTF-8"?>', '<rss version="2.0"><channel>',
           f"<title>{outlet} feed</title>"]
    for i, title, published in items:
        xml.append("<item>")
        xml.append(f"<title>{title}</title>")
        xml.append(f"<link>http://127.0.0.1:{{PORT}}/pages/{outlet}/{i}.html</link>")
        xml.append(f"<guid>{outlet}-{i}</guid>")
        xml.append(f"<pubDate>{format_datetime(published)}</pubDate>")
        xml.append("</item>")
    xml.append("</channel></rss>")
    with open(f"{ROOT}/corpus/feeds/{outlet}.xml", "w") as f:
        f.write("\n".join(xml))


def cumulative_series(weeks, base, growth, noise):
    total_cases, total_deaths = 0, 0
    rows = []
    for w in weeks:
        weekly_cases = max(0, int(base * (1 + growth * (w - weeks[0])) + rng.gauss(0, noise)))
        weekly_deaths = max(0, int(weekly_cases * 0.03 + rng.gauss(0, 1)))
        for d in range(7):
            day = datetime(2020, 1, 1) + timedelta(days=w * 7 + d)
            total_cases += weekly_cases // 7 + (1 if d < weekly_cases % 7 else 0)
            total_deaths += weekly_deaths // 7 + (1 if d < weekly_deaths % 7 else 0)
            rows.append((day.date().isoformat(), total_cases, total_deaths))
    return rows


def make_external():
    os.makedirs(f"{ROOT}/external", exist_ok=True)
    counties = [
        ("01001", "Autauga", "Alabama", 55869, 40, 0.02),
        ("01003", "Baldwin", "Alabama", 223234, 160, 0.05),
        ("01005", "Barbour", "Alabama", 24686, 18, 0.01),
        ("48113", "Dallas", "Texas", 2635516, 2200, 0.06),
        ("48201", "Harris", "Texas", 4713325, 4100, 0.04),
        ("48439", "Tarrant", "Texas", 2102515, 1700, 0.03),
    ]
    weeks = list(range(12, 41))
    with open(f"{ROOT}/external/cases.csv", "w") as f:
        f.write("date,county,state,fips,cases,deaths\n")
        for fips, name, state, pop, base, growth in counties:
            for day, cases, deaths in cumulative_series(weeks, base, growth, base * 0.2):
                f.write(f"{day},{name},{state},{fips},{cases},{deaths}\n")

    with open(f"{ROOT}/external/population.csv", "w") as f:
        f.write("fips,pop_2019\n")
        for fips, name, state, pop, base, growth in counties:
            f.write(f"{fips},{pop}\n")

    with open(f"{ROOT}/external/votes_2020.csv", "w") as f:
        f.write("fips,votes_trump,votes_biden\n")
        shares = {"01001": 0.71, "01003": 0.76, "01005": 0.53, "48113": 0.33, "48201": 0.42, "48439": 0.49}
        for fips, name, state, pop, base, growth in counties:
            votes = int(pop * 0.45)
            trump = int(votes * shares[fips])
            f.write(f"{fips},{trump},{votes - trump}\n")

    with open(f"{ROOT}/external/votes_2016.csv", "w") as f:
        f.write("fips,votes_trump,votes_biden\n")
        shares = {"01001": 0.73, "01003": 0.77, "01005": 0.52, "48113": 0.35, "48201": 0.41, "48439": 0.52}
        for fips, name, state, pop, base, growth in counties:
            votes = int(pop * 0.42)
            trump = int(votes * shares[fips])
            f.write(f"{fips},{trump},{votes - trump}\n")

    with open(f"{ROOT}/external/cre.csv", "w") as f:
        f.write("fips,pct_0,pct_1_2,pct_3plus\n")
        for fips, name, state, pop, base, growth in counties:
            p0 = round(rng.uniform(25, 40), 1)
            p12 = round(rng.uniform(35, 50), 1)
            f.write(f"{fips},{p0},{p12},{round(100 - p0 - p12, 1)}\n")

    with open(f"{ROOT}/external/ranks.csv", "w") as f:
        f.write("outlet_id,rank\n")
        f.write("outlet_a,150000\n")  # outlet_b missing: imputed as worst rank

    with open(f"{ROOT}/external/labels.csv", "w") as f:
        f.write("topic,annotator,label\n")
        for t in range(4):
            label = "covid" if t == 0 else "non-covid"
            f.write(f"{t},ann1,{label}\n")
            f.write(f"{t},ann2,{label if t != 3 else 'covid'}\n")
            if t == 3:
                f.write(f"{t},final,non-covid\n")


def make_conservation_fixture():
    """50 counties across 5 states for the aggregation conservation check."""
    state_prefixes = ["01", "06", "12", "36", "48"]
    with open(f"{ROOT}/external/cases_50.csv", "w") as f:
        f.write("date,county,state,fips,cases,deaths\n")
        rows = []
        for s, prefix in enumerate(state_prefixes):
            for c in range(10):
                fips = f"{prefix}{(2 * c + 1):03d}"
                base = rng.randint(5, 400)
                for day, cases, deaths in cumulative_series(list(range(12, 25)), base, 0.03, base * 0.3):
                    rows.append(f"{day},County{c},State{s},{fips},{cases},{deaths}\n")
        f.writelines(rows)
    with open(f"{ROOT}/external/population_50.csv", "w") as f:
        f.write("fips,pop_2019\n")
        for prefix in state_prefixes:
            for c in range(10):
                f.write(f"{prefix}{(2 * c + 1):03d},{rng.randint(8000, 900000)}\n")


def main():
    os.makedirs(f"{ROOT}/corpus/feeds", exist_ok=True)
    make_outlet("outlet_a", 100, 0.38, 14, 39)
    make_outlet("outlet_b", 100, 0.30, 14, 39)
    with open(f"{ROOT}/corpus/registry.csv", "w") as f:
        f.write("outlet_id,feed_url,homepage_url,county_fips,state\n")
        f.write("outlet_a,http://127.0.0.1:{PORT}/feeds/outlet_a.xml,http://127.0.0.1:{PORT}/,01001,AL\n")
        f.write("outlet_b,http://127.0.0.1:{PORT}/feeds/outlet_b.xml,http://127.0.0.1:{PORT}/,48113,TX\n")
    make_external()
    make_conservation_fixture()
    print("fixtures written under", ROOT)


if __name__ == "__main__":
    main()
