//! Effect rules: how device input changes a [`MockDesktop`].
//!
//! Key bindings and named commands are plain data ([`KEYMAP`],
//! [`Command::from_name`]); window layouts live in [`super::layout`].
//! Every rule either succeeds or leaves the desktop untouched.

use crate::action::{Direction, Platform};
use crate::env::{Input, MouseButton};

use super::desktop::{base_name, join_path, parent_folder, AppData, AppKind, MockDesktop};
use super::layout::{screen_view, Hit};
use super::pages::{normalize_url, page};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Save,
    Print,
    SelectAll,
    Copy,
    Paste,
    Confirm,
    Cancel,
    Go,
    Bookmark,
    Run,
    Close,
    Delete,
    Open,
    Rename,
    Up,
    Apply,
    VolUp,
    VolDown,
    Back,
    Home,
    Newline,
}

impl Command {
    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "save" => Command::Save,
            "print" => Command::Print,
            "confirm" => Command::Confirm,
            "cancel" => Command::Cancel,
            "go" => Command::Go,
            "bookmark" => Command::Bookmark,
            "open" => Command::Open,
            "rename" => Command::Rename,
            "delete" => Command::Delete,
            "up" => Command::Up,
            "apply" => Command::Apply,
            "vol_up" => Command::VolUp,
            "vol_down" => Command::VolDown,
            "back" => Command::Back,
            "home" => Command::Home,
            _ => return None,
        })
    }
}

/// Key bindings per app. `None` binds for every app; earlier rows win.
pub const KEYMAP: &[(Option<AppKind>, &str, Command)] = &[
    (Some(AppKind::Notepad), "ctrl+s", Command::Save),
    (Some(AppKind::Notepad), "ctrl+a", Command::SelectAll),
    (Some(AppKind::Notepad), "ctrl+c", Command::Copy),
    (Some(AppKind::Notepad), "ctrl+v", Command::Paste),
    (Some(AppKind::Notepad), "enter", Command::Newline),
    (Some(AppKind::Writer), "ctrl+s", Command::Save),
    (Some(AppKind::Writer), "ctrl+p", Command::Print),
    (Some(AppKind::Writer), "ctrl+a", Command::SelectAll),
    (Some(AppKind::Writer), "ctrl+c", Command::Copy),
    (Some(AppKind::Writer), "ctrl+v", Command::Paste),
    (Some(AppKind::Writer), "enter", Command::Newline),
    (Some(AppKind::SaveAs), "enter", Command::Confirm),
    (Some(AppKind::SaveAs), "escape", Command::Cancel),
    (Some(AppKind::Print), "enter", Command::Confirm),
    (Some(AppKind::Print), "escape", Command::Cancel),
    (Some(AppKind::Rename), "enter", Command::Confirm),
    (Some(AppKind::Rename), "escape", Command::Cancel),
    (Some(AppKind::Browser), "enter", Command::Go),
    (Some(AppKind::Browser), "ctrl+d", Command::Bookmark),
    (Some(AppKind::Calculator), "enter", Command::Confirm),
    (Some(AppKind::Calculator), "escape", Command::Cancel),
    (Some(AppKind::Terminal), "enter", Command::Run),
    (Some(AppKind::Files), "enter", Command::Open),
    (Some(AppKind::Files), "delete", Command::Delete),
    (Some(AppKind::Files), "f2", Command::Rename),
    (Some(AppKind::Files), "backspace", Command::Up),
    (Some(AppKind::StartMenu), "escape", Command::Close),
    (Some(AppKind::ContextMenu), "escape", Command::Close),
    (None, "alt+f4", Command::Close),
    (None, "ctrl+v", Command::Paste),
];

pub fn lookup_key(app: AppKind, chord: &str) -> Option<Command> {
    KEYMAP
        .iter()
        .find(|(a, k, _)| *k == chord && a.is_none_or(|a| a == app))
        .map(|(_, _, c)| *c)
}

type Effect = Result<(), String>;

/// Applies one input; on error the desktop is unchanged.
pub fn apply(d: &mut MockDesktop, input: &Input) -> Effect {
    let mut next = d.clone();
    next.tick += 1;
    apply_in_place(&mut next, input)?;
    next.refresh_titles();
    *d = next;
    Ok(())
}

fn apply_in_place(d: &mut MockDesktop, input: &Input) -> Effect {
    match input {
        Input::MoveTo { x, y } => {
            d.cursor = (*x, *y);
            Ok(())
        }
        Input::Click { button, count } => click(d, *button, *count),
        Input::Tap { x, y } => {
            d.cursor = (*x, *y);
            click(d, MouseButton::Left, 1)
        }
        Input::LongTap { x, y } => {
            d.cursor = (*x, *y);
            click(d, MouseButton::Right, 1)
        }
        Input::Scroll { dist } => scroll_at(d, d.cursor, -dist),
        Input::Swipe { x, y, dir, dist } => swipe(d, *x, *y, *dir, *dist),
        Input::Drag { x1, y1, x2, y2 } => drag(d, *x1, *y1, *x2, *y2),
        Input::Press { keys } => press(d, &keys.join("+")),
        Input::Type { text } => type_text(d, text),
    }
}

fn click(d: &mut MockDesktop, button: MouseButton, count: u8) -> Effect {
    let (x, y) = d.cursor;
    let view = screen_view(d);
    enum Target {
        Chrome(String),
        Window(u32, Option<String>, bool),
        Nothing,
    }
    let target = match view.hit(x, y) {
        Hit::Chrome(w) => Target::Chrome(w.key.clone()),
        Hit::Window { view, widget, .. } => Target::Window(
            view.id,
            widget.filter(|w| w.enabled).map(|w| w.key.clone()),
            widget.is_some_and(|w| !w.enabled),
        ),
        Hit::Nothing => Target::Nothing,
    };
    match target {
        Target::Chrome(key) => {
            if button == MouseButton::Right {
                return Err("no context menu here".into());
            }
            chrome_click(d, &key)
        }
        Target::Window(id, key, disabled) => {
            let was_front = d.front().map(|w| w.id) == Some(id);
            if !was_front {
                if d.window(id).is_some_and(|w| !w.app.is_popup()) {
                    d.close_popups();
                }
                d.raise(id);
            }
            if disabled {
                return if was_front {
                    Err("the control is disabled".into())
                } else {
                    Ok(())
                };
            }
            match key {
                Some(key) => widget_click(d, id, &key, button, count),
                None if button == MouseButton::Right => Err("no context menu here".into()),
                None => Ok(()),
            }
        }
        Target::Nothing => {
            if button == MouseButton::Right {
                return Err("no context menu here".into());
            }
            d.close_popups();
            Ok(())
        }
    }
}

fn chrome_click(d: &mut MockDesktop, key: &str) -> Effect {
    if key == "start" {
        let open = d.windows.iter().any(|w| w.app == AppKind::StartMenu);
        d.close_popups();
        if !open {
            d.launch(AppKind::StartMenu, None)?;
        }
        return Ok(());
    }
    if let Some(app) = key.strip_prefix("launch:") {
        let app = AppKind::from_key(app).ok_or_else(|| format!("unknown app {app}"))?;
        d.close_popups();
        d.launch(app, None)?;
        return Ok(());
    }
    if let Some(cmd) = key.strip_prefix("cmd:") {
        return match cmd {
            "back" => match d.front().map(|w| w.id) {
                Some(id) => {
                    d.close(id);
                    Ok(())
                }
                None => Err("nothing to go back to".into()),
            },
            "home" => {
                d.windows.clear();
                Ok(())
            }
            other => Err(format!("unknown command {other}")),
        };
    }
    Err(format!("unknown control {key}"))
}

fn widget_click(d: &mut MockDesktop, id: u32, key: &str, button: MouseButton, count: u8) -> Effect {
    let is_item = key.starts_with("item:");
    if button == MouseButton::Right && !is_item {
        return Err("no context menu here".into());
    }
    if key == "close" {
        d.close(id);
        return Ok(());
    }
    if let Some(app) = key.strip_prefix("launch:") {
        let app = AppKind::from_key(app).ok_or_else(|| format!("unknown app {app}"))?;
        d.close_popups();
        d.launch(app, None)?;
        return Ok(());
    }
    if let Some(field) = key.strip_prefix("field:") {
        let w = d.window_mut(id).expect("hit window exists");
        w.focus = Some(field.to_string());
        return Ok(());
    }
    if let Some(setting) = key.strip_prefix("check:") {
        let cur = d.settings.get(setting).cloned().unwrap_or_default();
        let next = match (setting, cur.as_str()) {
            ("theme", "dark") => "light",
            ("theme", _) => "dark",
            (_, "on") => "off",
            _ => "on",
        };
        d.settings.insert(setting.to_string(), next.to_string());
        return Ok(());
    }
    if let Some(url) = key.strip_prefix("link:") {
        return navigate(d, id, url);
    }
    if let Some(k) = key.strip_prefix("calc:") {
        return calc_key(d, id, k);
    }
    if let Some(name) = key.strip_prefix("item:") {
        let name = name.to_string();
        if let Some(AppData::Files { selected, .. }) = d.window_mut(id).map(|w| &mut w.data) {
            *selected = Some(name.clone());
        }
        return match (button, count) {
            (MouseButton::Right, _) => {
                d.open_window(
                    AppKind::ContextMenu,
                    AppData::ContextMenu {
                        owner: id,
                        target: name,
                    },
                );
                Ok(())
            }
            (_, 2) => open_item(d, id, &name),
            _ => Ok(()),
        };
    }
    if let Some(cmd) = key.strip_prefix("cmd:") {
        let cmd = Command::from_name(cmd).ok_or_else(|| format!("unknown command {cmd}"))?;
        return run_command(d, id, cmd);
    }
    Err(format!("unknown control {key}"))
}

fn navigate(d: &mut MockDesktop, id: u32, url: &str) -> Effect {
    let url = normalize_url(url);
    if url.is_empty() {
        return Err("the address is empty".into());
    }
    if let Some(AppData::Browser { url: u, address }) = d.window_mut(id).map(|w| &mut w.data) {
        *u = url.clone();
        *address = url;
    }
    if let Some(w) = d.window_mut(id) {
        w.scroll = 0;
    }
    Ok(())
}

fn calc_key(d: &mut MockDesktop, id: u32, k: &str) -> Effect {
    let Some(AppData::Calculator { display }) = d.window_mut(id).map(|w| &mut w.data) else {
        return Err("not a calculator".into());
    };
    match k {
        "C" => *display = "0".into(),
        "=" => *display = evaluate(display),
        _ => {
            if display == "0" || display == "Error" {
                display.clear();
            }
            display.push_str(k);
        }
    }
    Ok(())
}

/// Integer arithmetic, evaluated left to right.
pub fn evaluate(expr: &str) -> String {
    let mut acc: Option<i64> = None;
    let mut op = '+';
    let mut num = String::new();
    let apply = |acc: Option<i64>, op: char, n: i64| -> Option<i64> {
        let a = acc.unwrap_or(0);
        match op {
            '+' => a.checked_add(n),
            '-' => a.checked_sub(n),
            '*' => a.checked_mul(n),
            '/' if n != 0 => Some(a / n),
            _ => None,
        }
    };
    for c in expr.chars().chain(std::iter::once('\0')) {
        if c.is_ascii_digit() {
            num.push(c);
            continue;
        }
        let Ok(n) = num.parse::<i64>() else {
            return "Error".into();
        };
        num.clear();
        acc = match apply(acc, op, n) {
            Some(v) => Some(v),
            None => return "Error".into(),
        };
        match c {
            '+' | '-' | '*' | '/' => op = c,
            '\0' => {}
            _ => return "Error".into(),
        }
    }
    acc.map(|v| v.to_string()).unwrap_or_else(|| "Error".into())
}

fn open_item(d: &mut MockDesktop, files_id: u32, name: &str) -> Effect {
    let Some(AppData::Files { folder, .. }) = d.window(files_id).map(|w| w.data.clone()) else {
        return Err("the file view is gone".into());
    };
    if let Some(sub) = name.strip_suffix('/') {
        let path = join_path(&folder, sub);
        if let Some(w) = d.window_mut(files_id) {
            w.data = AppData::Files {
                folder: path,
                selected: None,
            };
            w.scroll = 0;
        }
        return Ok(());
    }
    let path = join_path(&folder, name);
    let app = if name.ends_with(".txt") || name.ends_with(".log") || name.ends_with(".md") {
        AppKind::Notepad
    } else if name.ends_with(".docx") {
        AppKind::Writer
    } else {
        return Err(format!("no app can open {name}"));
    };
    d.launch(app, Some(&path))?;
    Ok(())
}

fn write_file(d: &mut MockDesktop, path: &str, content: String) -> Effect {
    let parent = parent_folder(path);
    if !d.folders.contains(parent) {
        return Err(format!("folder {parent} does not exist"));
    }
    if d.folders.contains(path) {
        return Err(format!("{path} is a folder"));
    }
    d.files.insert(path.to_string(), content);
    Ok(())
}

fn run_command(d: &mut MockDesktop, id: u32, cmd: Command) -> Effect {
    let w = d.window(id).ok_or("the window is gone")?.clone();
    match (cmd, &w.data) {
        (Command::Close, _) => {
            d.close(id);
            Ok(())
        }
        (Command::Save, AppData::Editor { path, buffer, .. }) => match path {
            Some(p) => write_file(d, p, buffer.clone()),
            None => {
                let folder = if d.folders.contains("/docs") { "/docs" } else { "/" };
                d.open_window(
                    AppKind::SaveAs,
                    AppData::SaveAs {
                        owner: id,
                        folder: folder.into(),
                        filename: String::new(),
                    },
                );
                Ok(())
            }
        },
        (Command::Print, AppData::Editor { .. }) if w.app == AppKind::Writer => {
            d.open_window(AppKind::Print, AppData::Print { owner: id });
            Ok(())
        }
        (Command::SelectAll, AppData::Editor { .. }) => {
            if let Some(AppData::Editor { select_all, .. }) = d.window_mut(id).map(|w| &mut w.data) {
                *select_all = true;
            }
            Ok(())
        }
        (Command::Copy, AppData::Editor { buffer, select_all, .. }) => {
            if !select_all {
                return Err("nothing is selected".into());
            }
            d.clipboard = buffer.clone();
            Ok(())
        }
        (Command::Paste, _) => {
            if d.clipboard.is_empty() {
                return Err("the clipboard is empty".into());
            }
            let clip = d.clipboard.clone();
            insert_text(d, &clip)
        }
        (Command::Newline, AppData::Editor { .. }) => {
            if w.focus.as_deref() != Some("buffer") {
                return Err("no focus target".into());
            }
            insert_text(d, "\n")
        }
        (Command::Confirm, AppData::SaveAs { owner, folder, filename }) => {
            let name = filename.trim();
            if name.is_empty() {
                return Err("the file name is empty".into());
            }
            let owner_win = d.window(*owner).ok_or("the editor was closed")?.clone();
            let AppData::Editor { buffer, .. } = &owner_win.data else {
                return Err("the editor was closed".into());
            };
            let mut path = if name.starts_with('/') {
                name.to_string()
            } else {
                join_path(folder, name)
            };
            if !base_name(&path).contains('.') {
                path.push_str(owner_win.app.default_extension());
            }
            write_file(d, &path, buffer.clone())?;
            if let Some(AppData::Editor { path: p, .. }) = d.window_mut(*owner).map(|w| &mut w.data) {
                *p = Some(path);
            }
            d.close(id);
            d.raise(*owner);
            Ok(())
        }
        (Command::Confirm, AppData::Print { owner }) => {
            let owner_win = d.window(*owner).ok_or("the document was closed")?.clone();
            let AppData::Editor { buffer, path, .. } = &owner_win.data else {
                return Err("the document was closed".into());
            };
            let name = path.as_deref().map(base_name).unwrap_or("untitled.docx").to_string();
            d.ensure_folder("/printer/queue");
            d.files.insert(join_path("/printer/queue", &name), buffer.clone());
            d.close(id);
            d.raise(*owner);
            Ok(())
        }
        (Command::Confirm, AppData::Rename { folder, original, name }) => {
            let new = name.trim();
            if new.is_empty() || new.contains('/') {
                return Err("invalid file name".into());
            }
            let from = join_path(folder, original);
            let to = join_path(folder, new);
            if d.files.contains_key(&to) || d.folders.contains(&to) {
                return Err(format!("{to} already exists"));
            }
            let content = d.files.remove(&from).ok_or_else(|| format!("{from} no longer exists"))?;
            d.files.insert(to, content);
            d.close(id);
            Ok(())
        }
        (Command::Confirm, AppData::Calculator { .. }) => calc_key(d, id, "="),
        (Command::Cancel, AppData::Calculator { .. }) => calc_key(d, id, "C"),
        (Command::Cancel, AppData::SaveAs { .. } | AppData::Print { .. } | AppData::Rename { .. }) => {
            d.close(id);
            Ok(())
        }
        (Command::Go, AppData::Browser { address, .. }) => navigate(d, id, &address.clone()),
        (Command::Bookmark, AppData::Browser { url, .. }) => {
            let url = url.clone();
            if page(&url).url.is_empty() {
                return Err("cannot bookmark a missing page".into());
            }
            d.ensure_folder("/home");
            d.files
                .entry("/home/bookmarks.txt".into())
                .or_default()
                .push_str(&format!("{url}\n"));
            Ok(())
        }
        (Command::Run, AppData::Terminal { input, .. }) => {
            let line = input.clone();
            let out = super::shell::run(d, &line);
            if let Some(AppData::Terminal { input, output }) = d.window_mut(id).map(|w| &mut w.data) {
                input.clear();
                output.push(format!("$ {line}"));
                output.extend(out);
            }
            if let Some(w) = d.window_mut(id) {
                w.scroll = u32::MAX;
            }
            clamp_scroll(d, id);
            Ok(())
        }
        (Command::Up, AppData::Files { folder, .. }) => {
            if folder == "/" {
                return Err("already at the top folder".into());
            }
            let up = parent_folder(folder).to_string();
            if let Some(w) = d.window_mut(id) {
                w.data = AppData::Files {
                    folder: up,
                    selected: None,
                };
                w.scroll = 0;
            }
            Ok(())
        }
        (Command::Open | Command::Rename | Command::Delete, AppData::Files { selected, .. }) => {
            let target = selected.clone().ok_or("no item is selected")?;
            item_command(d, id, &target, cmd)
        }
        (Command::Open | Command::Rename | Command::Delete, AppData::ContextMenu { owner, target }) => {
            let (owner, target) = (*owner, target.clone());
            d.close(id);
            item_command(d, owner, &target, cmd)
        }
        (Command::Apply, AppData::Settings { device_name }) => {
            let name = device_name.trim().to_string();
            if name.is_empty() {
                return Err("device name is empty".into());
            }
            if d.settings.get("device_name") == Some(&name) {
                return Err("the control is disabled".into());
            }
            d.settings.insert("device_name".into(), name);
            Ok(())
        }
        (Command::VolUp | Command::VolDown, AppData::Settings { .. }) => {
            let v: i32 = d.settings.get("volume").and_then(|v| v.parse().ok()).unwrap_or(0);
            let v = if cmd == Command::VolUp { (v + 1).min(10) } else { (v - 1).max(0) };
            d.settings.insert("volume".into(), v.to_string());
            Ok(())
        }
        (cmd, _) => Err(format!("{cmd:?} is not available in {}", w.title)),
    }
}

fn item_command(d: &mut MockDesktop, files_id: u32, name: &str, cmd: Command) -> Effect {
    let Some(AppData::Files { folder, .. }) = d.window(files_id).map(|w| w.data.clone()) else {
        return Err("the file view is gone".into());
    };
    match cmd {
        Command::Open => open_item(d, files_id, name),
        Command::Delete => {
            if let Some(sub) = name.strip_suffix('/') {
                let path = join_path(&folder, sub);
                if !d.list_folder(&path).is_empty() {
                    return Err(format!("folder {path} is not empty"));
                }
                d.folders.remove(&path);
            } else {
                d.files.remove(&join_path(&folder, name));
            }
            if let Some(AppData::Files { selected, .. }) = d.window_mut(files_id).map(|w| &mut w.data) {
                *selected = None;
            }
            clamp_scroll(d, files_id);
            Ok(())
        }
        Command::Rename => {
            if name.ends_with('/') {
                return Err("folders cannot be renamed".into());
            }
            d.open_window(
                AppKind::Rename,
                AppData::Rename {
                    folder,
                    original: name.to_string(),
                    name: String::new(),
                },
            );
            Ok(())
        }
        _ => unreachable!("item commands only"),
    }
}

fn clamp_scroll(d: &mut MockDesktop, id: u32) {
    let max = screen_view(d).window(id).map(|v| v.scroll_max);
    if let (Some(max), Some(w)) = (max, d.window_mut(id)) {
        w.scroll = w.scroll.min(max);
    }
}

fn insert_text(d: &mut MockDesktop, text: &str) -> Effect {
    let w = d.front_mut().ok_or("no focus target")?;
    let field = w.focus.clone().ok_or("no focus target")?;
    if let AppData::Editor { select_all, buffer, .. } = &mut w.data {
        if *select_all {
            buffer.clear();
            *select_all = false;
        }
    }
    let target = w.data.field_mut(&field).ok_or("no focus target")?;
    target.push_str(text);
    Ok(())
}

fn type_text(d: &mut MockDesktop, text: &str) -> Effect {
    if let Some(w) = d.front() {
        if w.app == AppKind::Calculator {
            let id = w.id;
            for c in text.chars().filter(|c| !c.is_whitespace()) {
                if !(c.is_ascii_digit() || "+-*/=".contains(c)) {
                    return Err(format!("the calculator does not accept {c:?}"));
                }
                calc_key(d, id, &c.to_string())?;
            }
            return Ok(());
        }
    }
    insert_text(d, text)
}

fn press(d: &mut MockDesktop, chord: &str) -> Effect {
    let Some(front) = d.front().cloned() else {
        return Err(format!("{chord} has no effect"));
    };
    if let Some(cmd) = lookup_key(front.app, chord) {
        return run_command(d, front.id, cmd);
    }
    if front.focus.is_some() {
        match chord {
            "backspace" => {
                let field = front.focus.clone().unwrap_or_default();
                let w = d.front_mut().expect("front exists");
                if let Some(t) = w.data.field_mut(&field) {
                    t.pop();
                }
                return Ok(());
            }
            "space" => return insert_text(d, " "),
            k if k.len() == 1 => return insert_text(d, k),
            _ => {}
        }
    }
    Err(format!("{chord} has no effect in {}", front.title))
}

fn scroll_at(d: &mut MockDesktop, (x, y): (i32, i32), rows: i32) -> Effect {
    let view = screen_view(d);
    let Hit::Window { view: w, .. } = view.hit(x, y) else {
        return Err("nothing to scroll".into());
    };
    if w.scroll_max == 0 {
        return Err("nothing to scroll".into());
    }
    let id = w.id;
    let max = w.scroll_max as i64;
    let win = d.window_mut(id).expect("hit window exists");
    let cur = (win.scroll as i64).min(max);
    win.scroll = (cur + rows as i64).clamp(0, max) as u32;
    Ok(())
}

/// Swipes move the content under the finger by whole rows: `dist` is the
/// fraction of the visible rows to shift, at least one row.
fn swipe(d: &mut MockDesktop, x: i32, y: i32, dir: Direction, dist: f64) -> Effect {
    if d.platform != Platform::Smartphone {
        return Err("swipe needs a touch screen".into());
    }
    let view = screen_view(d);
    let visible = match view.hit(x, y) {
        Hit::Window { view, .. } => view.visible_rows.max(1),
        _ => return Err("nothing to swipe".into()),
    };
    let rows = ((dist * visible as f64).round() as i32).max(1);
    match dir {
        Direction::Up => scroll_at(d, (x, y), rows),
        Direction::Down => scroll_at(d, (x, y), -rows),
        Direction::Left | Direction::Right => Err("nothing to swipe sideways".into()),
    }
}

fn drag(d: &mut MockDesktop, x1: i32, y1: i32, x2: i32, y2: i32) -> Effect {
    let view = screen_view(d);
    let Hit::Window {
        view: w,
        on_title: true,
        widget: None,
    } = view.hit(x1, y1)
    else {
        return Err("nothing to drag".into());
    };
    let id = w.id;
    let (sw, _) = d.screen;
    let work_h = d.work_height();
    d.raise(id);
    let win = d.window_mut(id).expect("hit window exists");
    let r = win.rect;
    let nx = (r.x1 + x2 - x1).clamp(0, sw as i32 - r.width());
    let ny = (r.y1 + y2 - y1).clamp(0, work_h - r.height());
    win.rect = crate::grounding::PixelBox::new(nx, ny, nx + r.width(), ny + r.height());
    d.cursor = (x2, y2);
    Ok(())
}
