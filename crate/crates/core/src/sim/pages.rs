//! Static pages served by the mock browser.

pub enum PageLine {
    Text(&'static str),
    Link { label: &'static str, url: &'static str },
}

pub struct Page {
    pub url: &'static str,
    pub title: &'static str,
    pub lines: &'static [PageLine],
}

use PageLine::{Link, Text};

pub static PAGES: &[Page] = &[
    Page {
        url: "home.example",
        title: "Home",
        lines: &[
            Text("Welcome to the example web."),
            Link { label: "News", url: "news.example" },
            Link { label: "Weather", url: "weather.example" },
            Link { label: "Docs", url: "docs.example" },
        ],
    },
    Page {
        url: "news.example",
        title: "News",
        lines: &[
            Text("Headline: Local team wins the cup"),
            Text("Markets close higher on Friday"),
            Link { label: "Home", url: "home.example" },
        ],
    },
    Page {
        url: "weather.example",
        title: "Weather",
        lines: &[
            Text("Today: Sunny 21C"),
            Text("Tomorrow: Rain 16C"),
            Link { label: "Home", url: "home.example" },
        ],
    },
    Page {
        url: "docs.example",
        title: "Docs",
        lines: &[
            Text("Install: run setup --user"),
            Text("Version: 2.4.1"),
            Text("Support: help@docs.example"),
            Link { label: "Home", url: "home.example" },
        ],
    },
];

pub static NOT_FOUND: Page = Page {
    url: "",
    title: "Not found",
    lines: &[Text("The page could not be found.")],
};

pub fn normalize_url(url: &str) -> String {
    let u = url.trim();
    let u = u
        .strip_prefix("https://")
        .or_else(|| u.strip_prefix("http://"))
        .unwrap_or(u);
    u.trim_end_matches('/').to_lowercase()
}

pub fn page(url: &str) -> &'static Page {
    let u = normalize_url(url);
    PAGES.iter().find(|p| p.url == u).unwrap_or(&NOT_FOUND)
}
