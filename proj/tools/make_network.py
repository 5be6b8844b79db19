#!/usr/bin/env python3
"""Writes the synthetic 40-detector network used by the fixtures.

Detectors sit on an 8 x 5 grid over central Thessaloniki. Positions and
lengths are invented; only the detector count mirrors the real deployment.
"""
import argparse
import json
import math

ROWS, COLS = 5, 8
LAT0, LON0 = 40.615, 22.930
DLAT, DLON = 0.008, 0.011
DETOUR = 1.15


def haversine(a, b):
    r = 6371000.0
    p1, p2 = math.radians(a[0]), math.radians(b[0])
    dp = p2 - p1
    dl = math.radians(b[1] - a[1])
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * r * math.asin(math.sqrt(h))


def build():
    detectors = []
    pos = {}
    for r in range(ROWS):
        for c in range(COLS):
            did = "D%02d" % (r * COLS + c + 1)
            lat = round(LAT0 + r * DLAT, 6)
            lon = round(LON0 + c * DLON, 6)
            pos[(r, c)] = (did, lat, lon)
            detectors.append({"id": did, "name": "BT %s r%dc%d" % (did, r, c), "lat": lat, "lon": lon})
    links = []
    for (r, c), (did, lat, lon) in sorted(pos.items()):
        for dr, dc in ((0, 1), (1, 0)):
            n = (r + dr, c + dc)
            if n not in pos:
                continue
            nid, nlat, nlon = pos[n]
            length = round(haversine((lat, lon), (nlat, nlon)) * DETOUR / 10.0) * 10.0
            # even rows are arterials
            speed = 50.0 if (dr == 0 and r % 2 == 0) else 40.0
            links.append({"from": did, "to": nid, "length_m": length, "free_flow_kmh": speed})
            links.append({"from": nid, "to": did, "length_m": length, "free_flow_kmh": speed})
    return {
        "name": "thessaloniki40-synthetic",
        "synthetic": True,
        "detectors": detectors,
        "links": links,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    args = ap.parse_args()
    with open(args.out, "w") as f:
        json.dump(build(), f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
