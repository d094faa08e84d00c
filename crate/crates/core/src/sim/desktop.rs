use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::Platform;
use crate::grounding::PixelBox;

pub const DESKTOP_SCREEN: (u32, u32) = (800, 480);
pub const PHONE_SCREEN: (u32, u32) = (360, 640);
/// Top edge of the desktop taskbar / phone navigation bar.
pub const DESKTOP_WORK_H: i32 = 440;
pub const PHONE_WORK_H: i32 = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppKind {
    StartMenu,
    Notepad,
    Writer,
    Files,
    Settings,
    Browser,
    Calculator,
    Terminal,
    SaveAs,
    Print,
    Rename,
    ContextMenu,
}

impl AppKind {
    /// Apps a user can launch.
    pub const LAUNCHABLE: [AppKind; 7] = [
        AppKind::Notepad,
        AppKind::Writer,
        AppKind::Files,
        AppKind::Settings,
        AppKind::Browser,
        AppKind::Calculator,
        AppKind::Terminal,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            AppKind::StartMenu => "Start",
            AppKind::Notepad => "Notepad",
            AppKind::Writer => "Writer",
            AppKind::Files => "Files",
            AppKind::Settings => "Settings",
            AppKind::Browser => "Browser",
            AppKind::Calculator => "Calculator",
            AppKind::Terminal => "Terminal",
            AppKind::SaveAs => "Save As",
            AppKind::Print => "Print",
            AppKind::Rename => "Rename",
            AppKind::ContextMenu => "Menu",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            AppKind::StartMenu => "start_menu",
            AppKind::Notepad => "notepad",
            AppKind::Writer => "writer",
            AppKind::Files => "files",
            AppKind::Settings => "settings",
            AppKind::Browser => "browser",
            AppKind::Calculator => "calculator",
            AppKind::Terminal => "terminal",
            AppKind::SaveAs => "save_as",
            AppKind::Print => "print",
            AppKind::Rename => "rename",
            AppKind::ContextMenu => "context_menu",
        }
    }

    pub fn from_key(s: &str) -> Option<Self> {
        Self::LAUNCHABLE
            .into_iter()
            .chain([
                AppKind::StartMenu,
                AppKind::SaveAs,
                AppKind::Print,
                AppKind::Rename,
                AppKind::ContextMenu,
            ])
            .find(|a| a.key() == s)
    }

    /// Popups have no title bar and close when focus moves elsewhere.
    pub fn is_popup(self) -> bool {
        matches!(self, AppKind::StartMenu | AppKind::ContextMenu)
    }

    pub fn is_editor(self) -> bool {
        matches!(self, AppKind::Notepad | AppKind::Writer)
    }

    pub fn default_extension(self) -> &'static str {
        match self {
            AppKind::Writer => ".docx",
            _ => ".txt",
        }
    }
}

/// Per-window application state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AppData {
    None,
    Editor {
        path: Option<String>,
        buffer: String,
        select_all: bool,
    },
    Files {
        folder: String,
        selected: Option<String>,
    },
    Settings {
        device_name: String,
    },
    Browser {
        url: String,
        address: String,
    },
    Calculator {
        display: String,
    },
    Terminal {
        input: String,
        output: Vec<String>,
    },
    SaveAs {
        owner: u32,
        folder: String,
        filename: String,
    },
    Print {
        owner: u32,
    },
    Rename {
        folder: String,
        original: String,
        name: String,
    },
    ContextMenu {
        owner: u32,
        target: String,
    },
}

impl AppData {
    /// Mutable text behind a `field:<name>` key.
    pub fn field_mut(&mut self, field: &str) -> Option<&mut String> {
        match (self, field) {
            (AppData::Editor { buffer, .. }, "buffer") => Some(buffer),
            (AppData::Settings { device_name }, "device_name") => Some(device_name),
            (AppData::Browser { address, .. }, "address") => Some(address),
            (AppData::Terminal { input, .. }, "input") => Some(input),
            (AppData::SaveAs { filename, .. }, "filename") => Some(filename),
            (AppData::Rename { name, .. }, "name") => Some(name),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub id: u32,
    pub app: AppKind,
    pub title: String,
    pub rect: PixelBox,
    /// First visible scroll row.
    pub scroll: u32,
    /// Key of the focused text field, if any.
    pub focus: Option<String>,
    pub data: AppData,
}

/// Complete mutable state of the simulated machine. `windows` is kept in
/// z-order: the last entry is frontmost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockDesktop {
    pub platform: Platform,
    pub screen: (u32, u32),
    pub windows: Vec<Window>,
    pub folders: BTreeSet<String>,
    pub files: BTreeMap<String, String>,
    pub settings: BTreeMap<String, String>,
    pub clipboard: String,
    pub cursor: (i32, i32),
    pub tick: u64,
    pub seed: u64,
    pub next_window_id: u32,
    pub spawn_count: u64,
}

pub fn default_settings() -> BTreeMap<String, String> {
    [
        ("wifi", "on"),
        ("bluetooth", "off"),
        ("airplane", "off"),
        ("location", "on"),
        ("notifications", "on"),
        ("dnd", "off"),
        ("battery_saver", "off"),
        ("auto_rotate", "on"),
        ("autosave", "off"),
        ("theme", "light"),
        ("device_name", "desktop-1"),
        ("volume", "5"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

pub fn parent_folder(path: &str) -> &str {
    match path.rfind('/') {
        Some(0) => "/",
        Some(i) => &path[..i],
        None => "/",
    }
}

pub fn base_name(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

pub fn join_path(folder: &str, name: &str) -> String {
    if folder.ends_with('/') {
        format!("{folder}{name}")
    } else {
        format!("{folder}/{name}")
    }
}

impl MockDesktop {
    pub fn new(platform: Platform, seed: u64) -> Self {
        let screen = match platform {
            Platform::Desktop => DESKTOP_SCREEN,
            Platform::Smartphone => PHONE_SCREEN,
        };
        let mut settings = default_settings();
        if platform == Platform::Smartphone {
            settings.insert("device_name".into(), "phone-1".into());
        }
        Self {
            platform,
            screen,
            windows: Vec::new(),
            folders: ["/".to_string()].into_iter().collect(),
            files: BTreeMap::new(),
            settings,
            clipboard: String::new(),
            cursor: (screen.0 as i32 / 2, screen.1 as i32 / 2),
            tick: 0,
            seed,
            next_window_id: 1,
            spawn_count: 0,
        }
    }

    pub fn work_height(&self) -> i32 {
        match self.platform {
            Platform::Desktop => DESKTOP_WORK_H,
            Platform::Smartphone => PHONE_WORK_H,
        }
    }

    pub fn front(&self) -> Option<&Window> {
        self.windows.last()
    }

    pub fn front_mut(&mut self) -> Option<&mut Window> {
        self.windows.last_mut()
    }

    pub fn window(&self, id: u32) -> Option<&Window> {
        self.windows.iter().find(|w| w.id == id)
    }

    pub fn window_mut(&mut self, id: u32) -> Option<&mut Window> {
        self.windows.iter_mut().find(|w| w.id == id)
    }

    /// `(window id, field key)` of the single focused element. Only the
    /// frontmost window can hold focus.
    pub fn focus(&self) -> Option<(u32, &str)> {
        self.front()
            .and_then(|w| w.focus.as_deref().map(|f| (w.id, f)))
    }

    pub fn raise(&mut self, id: u32) {
        if let Some(pos) = self.windows.iter().position(|w| w.id == id) {
            let w = self.windows.remove(pos);
            self.windows.push(w);
        }
    }

    pub fn close(&mut self, id: u32) {
        self.windows.retain(|w| w.id != id);
    }

    pub fn close_popups(&mut self) {
        self.windows.retain(|w| !w.app.is_popup());
    }

    /// Creates all missing ancestors of `folder`.
    pub fn ensure_folder(&mut self, folder: &str) {
        let mut cur = String::new();
        self.folders.insert("/".into());
        for part in folder.split('/').filter(|p| !p.is_empty()) {
            cur.push('/');
            cur.push_str(part);
            self.folders.insert(cur.clone());
        }
    }

    /// Immediate children of `folder`: sub-folders (with a trailing `/`)
    /// first, then files, each sorted by name.
    pub fn list_folder(&self, folder: &str) -> Vec<String> {
        let is_child = |p: &str| p != folder && parent_folder(p) == folder;
        let mut out: Vec<String> = self
            .folders
            .iter()
            .filter(|p| is_child(p))
            .map(|p| format!("{}/", base_name(p)))
            .collect();
        out.extend(
            self.files
                .keys()
                .filter(|p| is_child(p))
                .map(|p| base_name(p).to_string()),
        );
        out
    }

    fn default_size(&self, app: AppKind) -> (i32, i32) {
        match app {
            AppKind::StartMenu => (160, 7 * 22 + 8),
            AppKind::Notepad | AppKind::Writer => (460, 300),
            AppKind::Files => (420, 320),
            AppKind::Settings => (420, 400),
            AppKind::Browser => (520, 320),
            AppKind::Calculator => (220, 140),
            AppKind::Terminal => (460, 280),
            AppKind::SaveAs => (340, 100),
            AppKind::Print => (260, 78),
            AppKind::Rename => (300, 78),
            AppKind::ContextMenu => (110, 3 * 22 + 8),
        }
    }

    /// Placement for a new window. Ordinary windows cascade with a small
    /// seeded jitter so runs with different seeds lay out differently.
    fn placement(&mut self, app: AppKind) -> PixelBox {
        let (sw, _) = self.screen;
        let work_h = self.work_height();
        if self.platform == Platform::Smartphone {
            return match app {
                AppKind::SaveAs | AppKind::Print | AppKind::Rename => {
                    PixelBox::new(10, 220, sw as i32 - 10, 400)
                }
                AppKind::ContextMenu => {
                    let (cx, cy) = self.cursor;
                    let (w, h) = (160, 3 * 44 + 8);
                    let x = cx.clamp(0, sw as i32 - w);
                    let y = cy.clamp(0, work_h - h);
                    PixelBox::new(x, y, x + w, y + h)
                }
                _ => PixelBox::new(0, 0, sw as i32, work_h),
            };
        }
        let (w, h) = self.default_size(app);
        match app {
            AppKind::StartMenu => PixelBox::new(0, work_h - h, w, work_h),
            AppKind::ContextMenu => {
                let (cx, cy) = self.cursor;
                let x = cx.clamp(0, sw as i32 - w);
                let y = cy.clamp(0, work_h - h);
                PixelBox::new(x, y, x + w, y + h)
            }
            AppKind::SaveAs | AppKind::Print | AppKind::Rename => {
                let x = (sw as i32 - w) / 2;
                let y = (work_h - h) / 2;
                PixelBox::new(x, y, x + w, y + h)
            }
            _ => {
                let n = self.windows.iter().filter(|w| !w.app.is_popup()).count() as i32;
                let mut rng = ChaCha8Rng::seed_from_u64(
                    self.seed ^ self.spawn_count.wrapping_mul(0x9E37_79B9_7F4A_7C15),
                );
                self.spawn_count += 1;
                let jx: i32 = rng.random_range(0..16);
                let jy: i32 = rng.random_range(0..8);
                let x = (40 + 28 * n + jx).clamp(0, sw as i32 - w);
                let y = (10 + 18 * n + jy).clamp(0, work_h - h);
                PixelBox::new(x, y, x + w, y + h)
            }
        }
    }

    pub fn open_window(&mut self, app: AppKind, data: AppData) -> u32 {
        if !app.is_popup() {
            self.close_popups();
        }
        let rect = self.placement(app);
        let id = self.next_window_id;
        self.next_window_id += 1;
        let focus = match &data {
            AppData::SaveAs { .. } => Some("filename"),
            AppData::Rename { .. } => Some("name"),
            AppData::Terminal { .. } => Some("input"),
            _ => None,
        };
        let mut w = Window {
            id,
            app,
            title: String::new(),
            rect,
            scroll: 0,
            focus: focus.map(str::to_string),
            data,
        };
        w.title = window_title(&w);
        self.windows.push(w);
        id
    }

    /// Opens an application, loading `path` into editors and `folder`
    /// views when given.
    pub fn launch(&mut self, app: AppKind, path: Option<&str>) -> Result<u32, String> {
        let data = match app {
            AppKind::Notepad | AppKind::Writer => {
                let buffer = match path {
                    Some(p) => self
                        .files
                        .get(p)
                        .cloned()
                        .ok_or_else(|| format!("file {p} does not exist"))?,
                    None => String::new(),
                };
                AppData::Editor {
                    path: path.map(str::to_string),
                    buffer,
                    select_all: false,
                }
            }
            AppKind::Files => {
                let folder = path.unwrap_or(if self.folders.contains("/docs") {
                    "/docs"
                } else {
                    "/"
                });
                if !self.folders.contains(folder) {
                    return Err(format!("folder {folder} does not exist"));
                }
                AppData::Files {
                    folder: folder.to_string(),
                    selected: None,
                }
            }
            AppKind::Settings => AppData::Settings {
                device_name: self.settings.get("device_name").cloned().unwrap_or_default(),
            },
            AppKind::Browser => {
                let url = path.unwrap_or("home.example").to_string();
                AppData::Browser {
                    address: url.clone(),
                    url,
                }
            }
            AppKind::Calculator => AppData::Calculator {
                display: "0".into(),
            },
            AppKind::Terminal => AppData::Terminal {
                input: String::new(),
                output: vec!["$".into()],
            },
            AppKind::StartMenu => AppData::None,
            other => return Err(format!("{} cannot be launched", other.display_name())),
        };
        Ok(self.open_window(app, data))
    }

    pub fn refresh_titles(&mut self) {
        for w in &mut self.windows {
            w.title = window_title(w);
        }
    }
}

pub fn window_title(w: &Window) -> String {
    let app = w.app.display_name();
    match &w.data {
        AppData::Editor { path, .. } => {
            let name = path.as_deref().map(base_name).unwrap_or("Untitled");
            format!("{name} - {app}")
        }
        AppData::Files { folder, .. } => format!("{folder} - {app}"),
        AppData::Browser { url, .. } => {
            format!("{} - {app}", super::pages::page(url).title)
        }
        _ => app.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths() {
        assert_eq!(parent_folder("/docs/a.txt"), "/docs");
        assert_eq!(parent_folder("/a.txt"), "/");
        assert_eq!(base_name("/docs/a.txt"), "a.txt");
        assert_eq!(join_path("/", "a"), "/a");
        assert_eq!(join_path("/docs", "a"), "/docs/a");
    }

    #[test]
    fn listing_puts_folders_first() {
        let mut d = MockDesktop::new(Platform::Desktop, 0);
        d.ensure_folder("/docs/projects");
        d.files.insert("/docs/b.txt".into(), String::new());
        d.files.insert("/docs/a.txt".into(), String::new());
        d.files.insert("/other.txt".into(), String::new());
        assert_eq!(d.list_folder("/docs"), vec!["projects/", "a.txt", "b.txt"]);
        assert_eq!(d.list_folder("/"), vec!["docs/", "other.txt"]);
    }

    #[test]
    fn placement_depends_on_seed_only() {
        let open = |seed| {
            let mut d = MockDesktop::new(Platform::Desktop, seed);
            d.launch(AppKind::Notepad, None).unwrap();
            d.launch(AppKind::Files, None).unwrap();
            d.windows.iter().map(|w| w.rect).collect::<Vec<_>>()
        };
        assert_eq!(open(7), open(7));
        assert_ne!(open(7), open(8));
    }

    #[test]
    fn focus_lives_in_front_window() {
        let mut d = MockDesktop::new(Platform::Desktop, 0);
        let t = d.launch(AppKind::Terminal, None).unwrap();
        assert_eq!(d.focus(), Some((t, "input")));
        d.launch(AppKind::Calculator, None).unwrap();
        assert_eq!(d.focus(), None);
        d.raise(t);
        assert_eq!(d.focus(), Some((t, "input")));
    }
}
