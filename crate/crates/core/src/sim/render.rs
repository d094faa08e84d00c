//! Pixel rendering and accessibility export of a [`ScreenView`].

use crate::grounding::detector::{WidgetStyle, INK};
use crate::grounding::font::draw_text;
use crate::grounding::{serialize_a11y_tree, A11yNode, PixelBox, Raster, Rgb};

use super::layout::{ChromeView, ScreenView, WidgetView, WindowView};

const BACKGROUND: Rgb = Rgb(0, 96, 128);
const WINDOW_FILL: Rgb = Rgb(228, 228, 228);
const WINDOW_BORDER: Rgb = Rgb(96, 96, 96);
const TITLE_FILL: Rgb = Rgb(48, 56, 104);
const TITLE_INK: Rgb = Rgb(250, 250, 250);
const BAR_FILL: Rgb = Rgb(40, 40, 48);

fn rect(r: &mut Raster, b: PixelBox, fill: Rgb) {
    r.fill_rect(b.x1 as i64, b.y1 as i64, b.x2 as i64, b.y2 as i64, fill);
}

fn draw_widgets(r: &mut Raster, widgets: &[WidgetView], active: bool) {
    for w in widgets {
        WidgetStyle::draw_widget(r, w.role, &w.name, w.bounds, active && w.enabled);
    }
}

fn draw_window(r: &mut Raster, v: &WindowView) {
    let f = v.frame;
    rect(r, f, WINDOW_FILL);
    r.outline_rect(f.x1 as i64, f.y1 as i64, f.x2 as i64, f.y2 as i64, WINDOW_BORDER);
    if let Some(bar) = v.title_bar {
        rect(r, bar, TITLE_FILL);
        draw_text(r, bar.x1 as i64 + 6, bar.y1 as i64 + (bar.height() as i64 - 7) / 2, &v.title, TITLE_INK);
    }
    draw_widgets(r, &v.widgets, v.front);
    for t in &v.texts {
        draw_text(r, t.bounds.x1 as i64, t.bounds.y1 as i64, &t.text, INK);
    }
}

pub fn render(view: &ScreenView) -> Raster {
    let (w, h) = view.screen;
    let mut r = Raster::new(w, h, BACKGROUND);
    if let Some(under) = &view.under {
        draw_widgets(&mut r, &under.widgets, !under.occluded);
    }
    for v in &view.windows {
        draw_window(&mut r, v);
    }
    rect(&mut r, view.over.frame, BAR_FILL);
    draw_widgets(&mut r, &view.over.widgets, true);
    r
}

fn widget_node(w: &WidgetView) -> A11yNode {
    let mut states = vec![if w.enabled { "enabled" } else { "disabled" }];
    if w.role == "textfield" {
        states.push("focusable");
    }
    if w.focused {
        states.push("focused");
    }
    if w.checked {
        states.push("checked");
    }
    if w.selected {
        states.push("selected");
    }
    A11yNode::new(w.role, &w.name, w.bounds, &states)
}

fn chrome_node(role: &str, c: &ChromeView) -> A11yNode {
    let states: &[&str] = if c.occluded {
        &["enabled", "occluded"]
    } else {
        &["enabled"]
    };
    A11yNode::new(role, c.name, c.frame, states).with_children(c.widgets.iter().map(widget_node).collect())
}

fn window_node(v: &WindowView) -> A11yNode {
    let states: &[&str] = if v.front {
        &["enabled", "active"]
    } else {
        &["enabled", "occluded"]
    };
    let mut children: Vec<(PixelBox, A11yNode)> = v
        .widgets
        .iter()
        .map(|w| (w.bounds, widget_node(w)))
        .chain(
            v.texts
                .iter()
                .map(|t| (t.bounds, A11yNode::new("text", &t.text, t.bounds, &["enabled"]))),
        )
        .collect();
    // Reading order: rows top to bottom, then left to right. The close
    // button sits in the title bar and therefore comes first.
    children.sort_by_key(|(b, _)| (b.y1 / 4, b.x1));
    A11yNode::new("window", &v.title, v.frame, states)
        .with_children(children.into_iter().map(|(_, n)| n).collect())
}

pub fn a11y_root(view: &ScreenView) -> A11yNode {
    let (w, h) = view.screen;
    let mut children = Vec::new();
    if let Some(under) = &view.under {
        children.push(chrome_node("pane", under));
    }
    children.extend(view.windows.iter().map(window_node));
    children.push(chrome_node("pane", &view.over));
    A11yNode::new("desktop", "Desktop", PixelBox::new(0, 0, w as i32, h as i32), &["enabled"])
        .with_children(children)
}

pub fn a11y_text(view: &ScreenView) -> String {
    serialize_a11y_tree(&a11y_root(view), Some(view.screen))
}
