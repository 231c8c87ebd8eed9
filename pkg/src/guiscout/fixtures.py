"""Deterministic fixture corpora and provider scripts.

Everything here is pure data construction: no randomness, no clock, so any
two builds of the same fixture are identical. The demo corpus backs the
CLI/demo walkthrough and the service tests; the synthetic corpora give
tests exact control over token overlap between queries and GUIs.
"""

from __future__ import annotations

import json
from pathlib import Path

from .corpus import GuiComponent, GuiDocument

SCREEN_W = 1440
SCREEN_H = 2560

_APPS = [
    ("shopmart", "ShopMart", "shopping", "products"),
    ("newsflash", "NewsFlash", "news", "articles"),
    ("tunebox", "TuneBox", "music", "songs"),
    ("travelgo", "TravelGo", "travel", "trips"),
    ("fitpulse", "FitPulse", "fitness", "workouts"),
    ("bankly", "Bankly", "banking", "accounts"),
    ("foodiehub", "FoodieHub", "food delivery", "dishes"),
    ("chatterly", "Chatterly", "social", "posts"),
    ("skycast", "SkyCast", "weather", "forecasts"),
    ("taskly", "Taskly", "task management", "tasks"),
    ("mailwise", "MailWise", "email", "messages"),
    ("snapgallery", "SnapGallery", "photo", "photos"),
]


def _row(i: int, height: int = 200, gap: int = 20) -> tuple[int, int, int, int]:
    top = 220 + i * (height + gap)
    return (40, top, SCREEN_W - 40, top + height)


def _c(
    cid: str,
    ctype: str,
    text: str = "",
    rid: str = "",
    classes: tuple[str, ...] = (),
    bounds: tuple[int, int, int, int] | None = None,
    children: list[GuiComponent] | None = None,
) -> GuiComponent:
    return GuiComponent(
        component_id=cid,
        component_type=ctype,
        displayed_text=text,
        resource_id=rid,
        semantic_classes=list(classes),
        bounds=bounds or (0, 0, SCREEN_W, SCREEN_H),
        children=children or [],
    )


def _doc(slug, screen, root, descriptions, flags=(), language="en") -> GuiDocument:
    return GuiDocument(
        gui_id=f"{slug}-{screen}",
        app_id=f"com.example.{slug}",
        root=root,
        s2w_descriptions=list(descriptions),
        filter_flags=set(flags),
        language_tag=language,
    )


def _login(slug, name, theme, items) -> GuiDocument:
    root = _c("c0", "CONTAINER", rid="login_screen", children=[
        _c("c1", "CONTAINER", rid="login_panel", bounds=(40, 200, 1400, 1600), children=[
            _c("c2", "TEXT", f"Welcome to {name}", "welcome_text", bounds=_row(0)),
            _c("c3", "TEXT_INPUT", "Email", "email_field", ("login input",), _row(1)),
            _c("c4", "TEXT_INPUT", "Password", "password_field", ("login input",), _row(2)),
            _c("c5", "BUTTON", "Sign in", "btn_sign_in", ("login button",), _row(3)),
            _c("c6", "TEXT", "Forgot password?", "forgot_password_link", (), _row(4)),
        ]),
    ])
    return _doc(slug, "login", root, [
        f"login page of the {name} app",
        f"screen where users sign in to a {theme} app",
        "a login form with email and password fields",
    ])


def _list(slug, name, theme, items) -> GuiDocument:
    root = _c("c0", "CONTAINER", rid="home_screen", children=[
        _c("c1", "TOOLBAR", name, "main_toolbar", (), (0, 0, SCREEN_W, 200), [
            _c("c2", "ICON", "", "menu_icon", ("menu",), (0, 40, 120, 160)),
            _c("c3", "ICON", "", "search_icon", ("search",), (1320, 40, 1440, 160)),
        ]),
        _c("c4", "LIST", "", f"{items}_list", (), (0, 220, SCREEN_W, 2300), [
            _c("c5", "LIST_ITEM", f"Popular {items}", f"{items}_row_title", (), _row(0)),
            _c("c6", "LIST_ITEM", f"New {items} today", f"{items}_row_new", (), _row(1)),
            _c("c7", "LIST_ITEM", f"Recommended {items} for you", f"{items}_row_reco", (), _row(2)),
        ]),
        _c("c8", "BUTTON", "See all", "btn_see_all", (), _row(9)),
    ])
    return _doc(slug, "list", root, [
        f"home screen of {name} listing {items}",
        f"a {theme} app screen showing a list of {items}",
        f"overview page with popular and new {items}",
    ])


def _detail(slug, name, theme, items) -> GuiDocument:
    single = items.rstrip("s")
    root = _c("c0", "CONTAINER", rid="detail_screen", children=[
        _c("c1", "IMAGE", "", f"{single}_image", (f"{single} picture",), (0, 0, SCREEN_W, 900)),
        _c("c2", "TEXT", f"About this {single}", "detail_title", (), _row(4)),
        _c("c3", "TEXT", f"Details and description of the selected {single}", "detail_body", (), _row(5)),
        _c("c4", "BUTTON", "Share", "btn_share", ("share button",), _row(6)),
        _c("c5", "BUTTON", "Save to favorites", "btn_favorite", (), _row(7)),
    ])
    return _doc(slug, "detail", root, [
        f"detail page for one {single} in {name}",
        f"screen showing a single {single} with actions",
        f"a {theme} app detail view",
    ])


def _search(slug, name, theme, items) -> GuiDocument:
    root = _c("c0", "CONTAINER", rid="search_screen", children=[
        _c("c1", "TEXT_INPUT", f"Search {items}", "search_bar_input", ("search bar",), (40, 40, 1400, 200)),
        _c("c2", "BUTTON", "Search", "btn_search", ("search button",), (1200, 40, 1400, 200)),
        _c("c3", "CONTAINER", rid="search_results", bounds=(0, 240, SCREEN_W, 2200), children=[
            _c("c4", "TEXT", f"Results for {items}", "results_header", (), _row(0)),
            _c("c5", "LIST_ITEM", f"Matching {items}", "result_row_1", (), _row(1)),
            _c("c6", "LIST_ITEM", f"More {items}", "result_row_2", (), _row(2)),
        ]),
        _c("c7", "TEXT", "Recent searches", "recent_searches_label", (), _row(8)),
    ])
    return _doc(slug, "search", root, [
        f"search screen of {name} for finding {items}",
        f"a {theme} app search page with a search bar",
        f"screen to search and filter {items}",
    ])


def _settings(slug, name, theme, items, language="en") -> GuiDocument:
    if language == "de":
        texts = ("Einstellungen", "Benachrichtigungen", "Dunkles Design", "Konto verwalten", "Abmelden")
        descriptions = [
            f"Einstellungsseite der {name} App",
            "Bildschirm mit Schaltern und Kontooptionen",
            f"eine deutsche Einstellungsansicht einer {theme} App",
        ]
    else:
        texts = ("Settings", "Notifications", "Dark mode", "Manage account", "Log out")
        descriptions = [
            f"settings page of the {name} app",
            "screen with notification and display switches",
            f"a {theme} app settings view with toggles",
        ]
    root = _c("c0", "CONTAINER", rid="settings_screen", children=[
        _c("c1", "TEXT", texts[0], "settings_title", (), _row(0)),
        _c("c2", "SWITCH", texts[1], "notifications_switch", ("toggle",), _row(1)),
        _c("c3", "SWITCH", texts[2], "dark_mode_switch", ("toggle",), _row(2)),
        _c("c4", "BUTTON", texts[3], "btn_manage_account", (), _row(3)),
        _c("c5", "BUTTON", texts[4], "btn_log_out", (), _row(4)),
    ])
    return _doc(slug, "settings", root, descriptions, language=language)


def _cart(slug, name, theme, items) -> GuiDocument:
    root = _c("c0", "CONTAINER", rid="cart_screen", children=[
        _c("c1", "TEXT", "Your cart", "cart_title", (), _row(0)),
        _c("c2", "LIST", "", "cart_item_list", (), (0, 440, SCREEN_W, 1800), [
            _c("c3", "LIST_ITEM", f"Selected {items}", "cart_row_1", (), _row(0)),
            _c("c4", "NUMBER_STEPPER", "1", "quantity_stepper", ("quantity",), _row(1)),
        ]),
        _c("c5", "TEXT", "Total", "total_label", (), _row(7)),
        _c("c6", "BUTTON", "Checkout", "btn_checkout", ("checkout button",), _row(8)),
    ])
    return _doc(slug, "cart", root, [
        f"shopping cart screen of {name}",
        f"screen listing {items} added to the cart with a checkout button",
        f"a {theme} app cart with quantities and total",
    ])


def _menu(slug, name, theme, items) -> GuiDocument:
    root = _c("c0", "CONTAINER", rid="home_with_menu", children=[
        _c("c1", "DRAWER", "", "navigation_drawer", ("navigation",), (0, 0, 900, SCREEN_H), [
            _c("c2", "TEXT", name, "drawer_header", (), (40, 40, 860, 240)),
            _c("c3", "LIST_ITEM", "Home", "menu_home", (), (40, 280, 860, 420)),
            _c("c4", "LIST_ITEM", f"My {items}", f"menu_{items}", (), (40, 440, 860, 580)),
            _c("c5", "LIST_ITEM", "Settings", "menu_settings", (), (40, 600, 860, 740)),
        ]),
        _c("c6", "TEXT", f"Browse {items}", "background_title", (), _row(0)),
    ])
    return _doc(slug, "menu", root, [
        f"opened navigation drawer in {name}",
        f"menu overlay of a {theme} app",
        "screen with an opened side menu",
    ], flags=("opened_menu",))


def _splash(slug, name, theme, items) -> GuiDocument:
    root = _c("c0", "CONTAINER", rid="splash_screen", children=[
        _c("c1", "IMAGE", "", "app_logo", ("logo",), (420, 1000, 1020, 1600)),
    ])
    return _doc(slug, "splash", root, [
        f"splash screen of {name}",
        "launch screen with only the app logo",
        f"a {theme} app loading screen",
    ], flags=("non_app_screen",))


def demo_corpus() -> list[GuiDocument]:
    """Sixty realistic GUI documents across twelve demo apps.

    Contents are pinned by tests: 4 GUIs flagged opened_menu, 1 flagged
    non_app_screen, one 2-component splash screen, one German-language
    settings screen, and 3 crowd descriptions per GUI.
    """
    fifth_screen = {
        "shopmart": _cart,
        "foodiehub": _cart,
        "newsflash": _menu,
        "tunebox": _menu,
        "chatterly": _menu,
        "taskly": _menu,
    }
    documents: list[GuiDocument] = []
    for slug, name, theme, items in _APPS:
        if slug == "snapgallery":
            documents.append(_splash(slug, name, theme, items))
        else:
            documents.append(_login(slug, name, theme, items))
        documents.append(_list(slug, name, theme, items))
        documents.append(_detail(slug, name, theme, items))
        documents.append(_search(slug, name, theme, items))
        if slug in fifth_screen:
            documents.append(fifth_screen[slug](slug, name, theme, items))
        elif slug == "skycast":
            documents.append(_settings(slug, name, theme, items, language="de"))
        else:
            documents.append(_settings(slug, name, theme, items))
    return documents


# -- synthetic corpora with controlled token overlap ------------------------


def synthetic_gui(gui_id: str, texts: list[str], descriptions: list[str] | None = None) -> GuiDocument:
    """One GUI whose extracted full text is exactly ``" ".join(texts)``.

    The root container carries no text, so only the generated TEXT leaves
    contribute candidates.
    """
    children = [
        _c(f"t{i}", "TEXT", text, bounds=_row(i % 9))
        for i, text in enumerate(texts, start=1)
    ]
    root = _c("c0", "CONTAINER", children=children)
    return GuiDocument(
        gui_id=gui_id,
        app_id="com.example.synthetic",
        root=root,
        s2w_descriptions=list(descriptions or []),
    )


def token_disjoint_corpus(n: int = 60, words_per_gui: int = 6) -> list[GuiDocument]:
    """n GUIs whose token sets are pairwise disjoint (before hashing)."""
    return [
        synthetic_gui(
            f"syn{i:03d}",
            [" ".join(f"app{i}word{j}" for j in range(words_per_gui))],
        )
        for i in range(n)
    ]


def planted_query_corpus(query: str, n: int = 60, planted_index: int = 7) -> tuple[list[GuiDocument], str]:
    """Token-disjoint corpus with one GUI whose full text equals ``query``."""
    documents = token_disjoint_corpus(n)
    planted_id = f"syn{planted_index:03d}"
    documents[planted_index] = synthetic_gui(planted_id, [query])
    return documents, planted_id


def plant_component(document: GuiDocument, text: str, component_id: str) -> None:
    """Append one TEXT leaf carrying ``text`` to the document root."""
    document.root.children.append(
        _c(component_id, "TEXT", text, bounds=_row(8))
    )


RERANK_QUERY = "alpha bravo charlie delta echo foxtrot golf hotel india juliet"
RERANK_FEATURES = (
    "crimson falcon compass widget",
    "velvet harbor beacon panel",
    "obsidian meadow lantern dial",
)


def rerank_scenario(n: int = 60) -> tuple[list[GuiDocument], str, str, tuple[str, ...]]:
    """Corpus where feedback reranking must rescue a buried GUI.

    Fifteen decoys share 1..9 tokens with the ten-token query, pushing the
    planted GUI (one shared token, sixteen tokens total) below ensemble
    rank 10 but inside the top 30. Only the planted GUI contains the three
    feature phrases. Returns (documents, query, planted_gui_id, features).
    """
    query_tokens = RERANK_QUERY.split()
    documents: list[GuiDocument] = []
    decoy_overlap = [9, 8, 8, 7, 7, 6, 6, 5, 5, 4, 4, 3, 3, 2, 2]
    for i, overlap in enumerate(decoy_overlap):
        tokens = query_tokens[:overlap] + [
            f"decoy{i}pad{j}" for j in range(len(query_tokens) - overlap)
        ]
        documents.append(synthetic_gui(f"dec{i:03d}", [" ".join(tokens)]))
    planted_id = "planted99"
    planted_tokens = [query_tokens[0]] + [f"plantpad{j}" for j in range(3)]
    planted = synthetic_gui(planted_id, [" ".join(planted_tokens)])
    for k, feature in enumerate(RERANK_FEATURES):
        plant_component(planted, feature, f"feat{k}")
    documents.append(planted)
    for i in range(n - len(documents)):
        documents.append(
            synthetic_gui(f"far{i:03d}", [" ".join(f"far{i}tok{j}" for j in range(6))])
        )
    return documents, RERANK_QUERY, planted_id, RERANK_FEATURES


# -- demo provider script ----------------------------------------------------

DEMO_QUERY = "a screen to browse grocery products with search"
DEMO_FEATURE = "search bar"

DEMO_RECOMMENDED_FEATURES = [
    "product filter",
    "shopping cart button",
    "barcode scanner",
    "price sort",
    "wishlist button",
]

_DEMO_EXPLANATIONS = {
    "product filter": "Narrows the product list by category or price so shoppers find items faster.",
    "shopping cart button": "Gives one-tap access to the items collected for checkout.",
    "barcode scanner": "Lets shoppers scan an item in store to pull up its product page.",
    "price sort": "Orders the listed products by price so budget options surface first.",
    "wishlist button": "Saves a product for later without adding it to the cart.",
}


def demo_llm_script() -> dict:
    """Scripted provider responses for the demo elicitation flow."""
    responses = [
        {
            "match": (
                "Return only the JSON array.\n\n"
                f"## Initial requirements\n{DEMO_QUERY}"
            ),
            "text": json.dumps(DEMO_RECOMMENDED_FEATURES),
        }
    ]
    for feature, explanation in _DEMO_EXPLANATIONS.items():
        responses.append({"match": f'Feature: "{feature}"', "text": explanation})
    return {"version": 1, "responses": responses}


def write_demo_llm_script(path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(demo_llm_script(), indent=2) + "\n", encoding="utf-8")
    return path
