"""Grid-diagram knot Floer complexes, crossing-change maps and unknotting bounds."""
