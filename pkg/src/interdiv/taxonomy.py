"""Fixed field, SDG and domain orderings used for every column index."""

FIELDS = (
    "Political Science",
    "Philosophy",
    "Economics",
    "Business",
    "Psychology",
    "Mathematics",
    "Medicine",
    "Biology",
    "Computer Science",
    "Geology",
    "Chemistry",
    "Art",
    "Sociology",
    "Engineering",
    "Geography",
    "History",
    "Materials Science",
    "Physics",
    "Environmental Science",
)

# OpenAlex level-0 concept ids, same order as FIELDS
FIELD_CONCEPT_IDS = (
    "C17744445",
    "C138885662",
    "C162324750",
    "C144133560",
    "C15744967",
    "C33923547",
    "C71924100",
    "C86803240",
    "C41008148",
    "C127313418",
    "C185592680",
    "C142362112",
    "C144024400",
    "C127413603",
    "C205649164",
    "C95457728",
    "C192562407",
    "C121332964",
    "C39432304",
)

SDGS = (
    "No poverty",
    "Zero hunger",
    "Good health and well-being",
    "Quality education",
    "Gender equality",
    "Clean water and sanitation",
    "Affordable and clean energy",
    "Decent work and economic growth",
    "Industry, innovation and infrastructure",
    "Reduced inequalities",
    "Sustainable cities and communities",
    "Responsible consumption and production",
    "Climate action",
    "Life below water",
    "Life on land",
    "Peace, justice and strong institutions",
    "Partnerships for the goals",
)

# OpenAlex domain ids 1..4, matching the nwork1..4 / nIDR1..4 columns
DOMAINS = (
    "Life Sciences",
    "Social Sciences",
    "Physical Sciences",
    "Health Sciences",
)

N_FIELDS = len(FIELDS)
N_SDGS = len(SDGS)
N_DOMAINS = len(DOMAINS)


def field_index(name_or_number):
    """Zero-based column of a field given its 1-based number or its name."""
    if isinstance(name_or_number, str):
        key = name_or_number.strip().casefold()
        if key.isdigit():
            return field_index(int(key))
        for i, name in enumerate(FIELDS):
            if name.casefold() == key:
                return i
        raise KeyError(f"unknown field {name_or_number!r}")
    n = int(name_or_number)
    if not 1 <= n <= N_FIELDS:
        raise KeyError(f"field number {n} outside 1..{N_FIELDS}")
    return n - 1


def sdg_index(number):
    n = int(number)
    if not 1 <= n <= N_SDGS:
        raise KeyError(f"SDG number {n} outside 1..{N_SDGS}")
    return n - 1
