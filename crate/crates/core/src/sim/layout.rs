//! Geometry of everything on screen. Rendering, the accessibility export
//! and hit testing all read the same [`ScreenView`], so the three never
//! disagree.

use crate::action::Platform;
use crate::grounding::detector::WidgetStyle;
use crate::grounding::font::text_width;
use crate::grounding::PixelBox;

use super::desktop::{AppData, AppKind, MockDesktop, Window};
use super::pages::{page, PageLine};

#[derive(Debug, Clone, Copy)]
pub struct Metrics {
    pub title_h: i32,
    pub row_h: i32,
    pub widget_h: i32,
    pub pad: i32,
}

pub fn metrics(platform: Platform) -> Metrics {
    match platform {
        Platform::Desktop => Metrics {
            title_h: 20,
            row_h: 22,
            widget_h: 16,
            pad: 6,
        },
        Platform::Smartphone => Metrics {
            title_h: 28,
            row_h: 44,
            widget_h: 32,
            pad: 8,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Part {
    Widget {
        key: String,
        role: &'static str,
        name: String,
        width: i32,
        enabled: bool,
        checked: bool,
        selected: bool,
    },
    Text(String),
}

fn widget(key: impl Into<String>, role: &'static str, name: impl Into<String>) -> Part {
    Part::Widget {
        key: key.into(),
        role,
        name: name.into(),
        width: 0,
        enabled: true,
        checked: false,
        selected: false,
    }
}

fn wide(mut p: Part, w: i32) -> Part {
    if let Part::Widget { width, .. } = &mut p {
        *width = w;
    }
    p
}

fn text(s: impl Into<String>) -> Part {
    Part::Text(s.into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidgetView {
    pub key: String,
    pub role: &'static str,
    pub name: String,
    pub bounds: PixelBox,
    pub enabled: bool,
    pub checked: bool,
    pub selected: bool,
    pub focused: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextView {
    pub text: String,
    pub bounds: PixelBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowView {
    pub id: u32,
    pub app: AppKind,
    pub title: String,
    pub frame: PixelBox,
    pub title_bar: Option<PixelBox>,
    pub widgets: Vec<WidgetView>,
    pub texts: Vec<TextView>,
    pub visible_rows: u32,
    pub scroll_max: u32,
    pub front: bool,
}

impl WindowView {
    pub fn widget_at(&self, x: i32, y: i32) -> Option<&WidgetView> {
        self.widgets.iter().find(|w| w.bounds.contains(x, y))
    }

    /// All text a user can read in the window: title, labels and values.
    pub fn visible_text(&self) -> String {
        let mut parts = vec![self.title.clone()];
        parts.extend(self.widgets.iter().map(|w| w.name.clone()));
        parts.extend(self.texts.iter().map(|t| t.text.clone()));
        parts.join("\n")
    }
}

/// Always-on-top strips (taskbar, navigation bar) and the phone home screen.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromeView {
    pub name: &'static str,
    pub frame: PixelBox,
    pub widgets: Vec<WidgetView>,
    pub occluded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenView {
    pub screen: (u32, u32),
    /// Drawn before windows (phone home screen).
    pub under: Option<ChromeView>,
    /// Back to front.
    pub windows: Vec<WindowView>,
    /// Drawn after windows.
    pub over: ChromeView,
}

pub enum Hit<'a> {
    Chrome(&'a WidgetView),
    Window {
        view: &'a WindowView,
        widget: Option<&'a WidgetView>,
        on_title: bool,
    },
    Nothing,
}

impl ScreenView {
    pub fn window(&self, id: u32) -> Option<&WindowView> {
        self.windows.iter().find(|w| w.id == id)
    }

    pub fn hit(&self, x: i32, y: i32) -> Hit<'_> {
        if self.over.frame.contains(x, y) {
            return match self.over.widgets.iter().find(|w| w.bounds.contains(x, y)) {
                Some(w) => Hit::Chrome(w),
                None => Hit::Nothing,
            };
        }
        for view in self.windows.iter().rev() {
            if view.frame.contains(x, y) {
                return Hit::Window {
                    view,
                    widget: view.widget_at(x, y),
                    on_title: view.title_bar.is_some_and(|b| b.contains(x, y)),
                };
            }
        }
        if let Some(under) = &self.under {
            if let Some(w) = under.widgets.iter().find(|w| w.bounds.contains(x, y)) {
                return Hit::Chrome(w);
            }
        }
        Hit::Nothing
    }
}

const SETTING_ROWS: [(&str, &str); 9] = [
    ("wifi", "Wi-Fi"),
    ("bluetooth", "Bluetooth"),
    ("airplane", "Airplane mode"),
    ("location", "Location"),
    ("notifications", "Notifications"),
    ("dnd", "Do not disturb"),
    ("battery_saver", "Battery saver"),
    ("auto_rotate", "Auto rotate"),
    ("autosave", "Auto save"),
];

/// The Start menu lists every launchable app in this order.
pub fn start_menu_apps() -> [AppKind; 7] {
    AppKind::LAUNCHABLE
}

/// Taskbar launchers on the desktop.
pub const TASKBAR_APPS: [AppKind; 4] = [
    AppKind::Notepad,
    AppKind::Files,
    AppKind::Browser,
    AppKind::Terminal,
];

/// Home-screen icons on the phone.
pub const HOME_APPS: [AppKind; 5] = [
    AppKind::Notepad,
    AppKind::Settings,
    AppKind::Browser,
    AppKind::Calculator,
    AppKind::Files,
];

type Rows = Vec<Vec<Part>>;

/// `(fixed rows, scrollable rows)` of a window's content.
fn content(w: &Window, d: &MockDesktop, inner_w: i32) -> (Rows, Rows) {
    let phone = d.platform == Platform::Smartphone;
    let field_w = if phone { 120 } else { 96 };
    match &w.data {
        AppData::None => match w.app {
            AppKind::StartMenu => (
                vec![],
                start_menu_apps()
                    .iter()
                    .map(|a| {
                        vec![wide(
                            widget(format!("launch:{}", a.key()), "menuitem", a.display_name()),
                            inner_w,
                        )]
                    })
                    .collect(),
            ),
            _ => (vec![], vec![]),
        },
        AppData::Editor { buffer, .. } => {
            let mut toolbar = vec![widget("cmd:save", "button", "Save")];
            if w.app == AppKind::Writer {
                toolbar.push(widget("cmd:print", "button", "Print"));
            }
            let fixed = vec![toolbar, vec![wide(widget("field:buffer", "textfield", "Document"), field_w)]];
            let lines = buffer.split('\n').map(|l| vec![text(l)]).collect();
            (fixed, lines)
        }
        AppData::SaveAs {
            folder, filename, ..
        } => (
            vec![
                vec![text(format!("Folder: {folder}"))],
                vec![
                    wide(widget("field:filename", "textfield", "File name"), field_w),
                    text(filename.clone()),
                ],
                vec![
                    widget("cmd:confirm", "button", "Save"),
                    widget("cmd:cancel", "button", "Cancel"),
                ],
            ],
            vec![],
        ),
        AppData::Print { .. } => (
            vec![
                vec![text("Printer: Office printer")],
                vec![
                    widget("cmd:confirm", "button", "Print"),
                    widget("cmd:cancel", "button", "Cancel"),
                ],
            ],
            vec![],
        ),
        AppData::Rename { name, .. } => (
            vec![
                vec![
                    wide(widget("field:name", "textfield", "New name"), field_w),
                    text(name.clone()),
                ],
                vec![
                    widget("cmd:confirm", "button", "OK"),
                    widget("cmd:cancel", "button", "Cancel"),
                ],
            ],
            vec![],
        ),
        AppData::ContextMenu { .. } => (
            vec![],
            ["Open", "Rename", "Delete"]
                .iter()
                .map(|n| {
                    vec![wide(
                        widget(format!("cmd:{}", n.to_lowercase()), "menuitem", *n),
                        inner_w,
                    )]
                })
                .collect(),
        ),
        AppData::Files { folder, selected } => {
            let fixed = vec![vec![widget("cmd:up", "button", "Up"), text(folder.clone())]];
            let items = d
                .list_folder(folder)
                .into_iter()
                .map(|name| {
                    let mut p = wide(widget(format!("item:{name}"), "listitem", name.clone()), 200.min(inner_w));
                    if let Part::Widget { selected: s, .. } = &mut p {
                        *s = selected.as_deref() == Some(name.as_str());
                    }
                    vec![p]
                })
                .collect();
            (fixed, items)
        }
        AppData::Settings { device_name } => {
            let check_w = if phone { 200 } else { 130 };
            let on = |key: &str, on_value: &str| d.settings.get(key).map(String::as_str) == Some(on_value);
            let mut rows: Rows = SETTING_ROWS
                .iter()
                .map(|(key, label)| {
                    let checked = on(key, "on");
                    let mut p = wide(widget(format!("check:{key}"), "checkbox", *label), check_w);
                    if let Part::Widget { checked: c, .. } = &mut p {
                        *c = checked;
                    }
                    vec![p, text(if checked { "on" } else { "off" })]
                })
                .collect();
            let current = d.settings.get("device_name").cloned().unwrap_or_default();
            rows.push(vec![
                wide(widget("field:device_name", "textfield", "Device name"), check_w),
                text(device_name.clone()),
            ]);
            let mut apply = widget("cmd:apply", "button", "Apply");
            if let Part::Widget { enabled, .. } = &mut apply {
                *enabled = *device_name != current;
            }
            rows.push(vec![apply]);
            rows.push(vec![
                widget("cmd:vol_down", "button", "Vol -"),
                widget("cmd:vol_up", "button", "Vol +"),
                text(format!(
                    "Volume: {}",
                    d.settings.get("volume").map(String::as_str).unwrap_or("0")
                )),
            ]);
            let dark = on("theme", "dark");
            let mut p = wide(widget("check:theme", "checkbox", "Dark mode"), check_w);
            if let Part::Widget { checked, .. } = &mut p {
                *checked = dark;
            }
            rows.push(vec![p, text(if dark { "on" } else { "off" })]);
            (vec![], rows)
        }
        AppData::Browser { url, address } => {
            let p = page(url);
            let fixed = vec![
                vec![
                    wide(widget("field:address", "textfield", "Address"), field_w),
                    text(address.clone()),
                ],
                vec![
                    widget("cmd:go", "button", "Go"),
                    widget("cmd:bookmark", "button", "Bookmark"),
                ],
            ];
            let lines = p
                .lines
                .iter()
                .map(|l| match l {
                    PageLine::Text(t) => vec![text(*t)],
                    PageLine::Link { label, url } => vec![widget(format!("link:{url}"), "link", *label)],
                })
                .collect();
            (fixed, lines)
        }
        AppData::Calculator { display } => {
            let bw = if phone { 60 } else { 28 };
            let grid = [["7", "8", "9", "+"], ["4", "5", "6", "-"], ["1", "2", "3", "*"], ["C", "0", "=", "/"]];
            let mut rows: Rows = vec![vec![text(format!("= {display}"))]];
            rows.extend(grid.iter().map(|r| {
                r.iter()
                    .map(|k| wide(widget(format!("calc:{k}"), "button", *k), bw))
                    .collect()
            }));
            (rows, vec![])
        }
        AppData::Terminal { input, output } => (
            vec![vec![
                wide(widget("field:input", "textfield", "Command"), field_w),
                text(input.clone()),
            ]],
            output.iter().map(|l| vec![text(l.clone())]).collect(),
        ),
    }
}

#[allow(clippy::too_many_arguments)]
fn place_row(
    row: &[Part],
    x0: i32,
    x_max: i32,
    y: i32,
    m: Metrics,
    focus: Option<&str>,
    widgets: &mut Vec<WidgetView>,
    texts: &mut Vec<TextView>,
) {
    let mut x = x0;
    let wy = y + (m.row_h - m.widget_h) / 2;
    for part in row {
        match part {
            Part::Widget {
                key,
                role,
                name,
                width,
                enabled,
                checked,
                selected,
            } => {
                let w = (*width).max(WidgetStyle::min_width(name));
                if x + w > x_max {
                    break;
                }
                widgets.push(WidgetView {
                    key: key.clone(),
                    role,
                    name: name.clone(),
                    bounds: PixelBox::new(x, wy, x + w, wy + m.widget_h),
                    enabled: *enabled,
                    checked: *checked,
                    selected: *selected,
                    focused: focus.is_some_and(|f| key.strip_prefix("field:") == Some(f)),
                });
                x += w + m.pad;
            }
            Part::Text(t) => {
                let room = (x_max - x).max(0) as u32;
                let mut shown = String::new();
                for c in t.chars() {
                    shown.push(c);
                    if text_width(&shown) > room {
                        shown.pop();
                        break;
                    }
                }
                if !shown.is_empty() {
                    let tw = text_width(&shown) as i32;
                    let ty = y + (m.row_h - 7) / 2;
                    texts.push(TextView {
                        text: shown,
                        bounds: PixelBox::new(x, ty, x + tw, ty + 7),
                    });
                    x += tw + m.pad;
                }
            }
        }
    }
}

pub fn window_view(w: &Window, d: &MockDesktop, front: bool) -> WindowView {
    let m = metrics(d.platform);
    let f = w.rect;
    let phone = d.platform == Platform::Smartphone;
    let mut widgets = Vec::new();
    let mut texts = Vec::new();
    let title_bar = (!w.app.is_popup()).then(|| PixelBox::new(f.x1, f.y1, f.x2, f.y1 + m.title_h));
    if let Some(bar) = title_bar {
        if !phone {
            let cw = WidgetStyle::min_width("Close");
            let cy = bar.y1 + (m.title_h - m.widget_h) / 2;
            widgets.push(WidgetView {
                key: "close".into(),
                role: "button",
                name: "Close".into(),
                bounds: PixelBox::new(bar.x2 - 2 - cw, cy, bar.x2 - 2, cy + m.widget_h),
                enabled: true,
                checked: false,
                selected: false,
                focused: false,
            });
        }
    }
    let x0 = f.x1 + m.pad;
    let x_max = f.x2 - m.pad;
    let inner_w = x_max - x0;
    let (fixed, scroll_rows) = content(w, d, inner_w);
    let mut y = title_bar.map_or(f.y1 + 4, |b| b.y2 + 4);
    let focus = if front { w.focus.as_deref() } else { None };
    for row in &fixed {
        place_row(row, x0, x_max, y, m, focus, &mut widgets, &mut texts);
        y += m.row_h;
    }
    let visible = ((f.y2 - 4 - y).max(0) / m.row_h) as u32;
    let scroll_max = (scroll_rows.len() as u32).saturating_sub(visible);
    let start = w.scroll.min(scroll_max) as usize;
    for row in scroll_rows.iter().skip(start).take(visible as usize) {
        place_row(row, x0, x_max, y, m, focus, &mut widgets, &mut texts);
        y += m.row_h;
    }
    WindowView {
        id: w.id,
        app: w.app,
        title: w.title.clone(),
        frame: f,
        title_bar,
        widgets,
        texts,
        visible_rows: visible,
        scroll_max,
        front,
    }
}

fn strip(
    name: &'static str,
    frame: PixelBox,
    items: Vec<(String, &'static str, String)>,
    m: Metrics,
    occluded: bool,
) -> ChromeView {
    let mut widgets = Vec::new();
    let mut x = frame.x1 + m.pad;
    let y = frame.y1 + (frame.height() - m.widget_h) / 2;
    for (key, role, label) in items {
        let w = WidgetStyle::min_width(&label);
        widgets.push(WidgetView {
            key,
            role,
            name: label,
            bounds: PixelBox::new(x, y, x + w, y + m.widget_h),
            enabled: true,
            checked: false,
            selected: false,
            focused: false,
        });
        x += w + m.pad;
    }
    ChromeView {
        name,
        frame,
        widgets,
        occluded,
    }
}

pub fn screen_view(d: &MockDesktop) -> ScreenView {
    let m = metrics(d.platform);
    let (sw, sh) = (d.screen.0 as i32, d.screen.1 as i32);
    let work_h = d.work_height();
    let n = d.windows.len();
    let windows = d
        .windows
        .iter()
        .enumerate()
        .map(|(i, w)| window_view(w, d, i + 1 == n))
        .collect();
    let bar = PixelBox::new(0, work_h, sw, sh);
    match d.platform {
        Platform::Desktop => {
            let mut items = vec![("start".to_string(), "button", "Start".to_string())];
            items.extend(
                TASKBAR_APPS
                    .iter()
                    .map(|a| (format!("launch:{}", a.key()), "icon", a.display_name().to_string())),
            );
            ScreenView {
                screen: d.screen,
                under: None,
                windows,
                over: strip("Taskbar", bar, items, m, false),
            }
        }
        Platform::Smartphone => {
            let home_frame = PixelBox::new(0, 0, sw, work_h);
            let mut home = ChromeView {
                name: "Home screen",
                frame: home_frame,
                widgets: Vec::new(),
                occluded: n > 0,
            };
            for (i, a) in HOME_APPS.iter().enumerate() {
                let label = a.display_name();
                let w = 100.max(WidgetStyle::min_width(label));
                let (col, row) = ((i % 3) as i32, (i / 3) as i32);
                let x = 12 + col * 116;
                let y = 40 + row * 60;
                home.widgets.push(WidgetView {
                    key: format!("launch:{}", a.key()),
                    role: "icon",
                    name: label.to_string(),
                    bounds: PixelBox::new(x, y, x + w, y + m.widget_h),
                    enabled: true,
                    checked: false,
                    selected: false,
                    focused: false,
                });
            }
            let items = vec![
                ("cmd:back".to_string(), "button", "Back".to_string()),
                ("cmd:home".to_string(), "button", "Home".to_string()),
            ];
            ScreenView {
                screen: d.screen,
                under: Some(home),
                windows,
                over: strip("Navigation bar", bar, items, m, false),
            }
        }
    }
}
