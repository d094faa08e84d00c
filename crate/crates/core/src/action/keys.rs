//! Key-name table for `computer.keyboard.press`.
//!
//! 60 names: `a`-`z`, `0`-`9`, `f1`-`f10`, the modifiers `ctrl`, `alt`,
//! `shift`, `win`, and `enter`, `tab`, `escape`, `backspace`, `delete`,
//! `space`, `up`, `down`, `left`, `right`. A chord joins names with `+`
//! (`ctrl+shift+s`); any arity is accepted as a single press.

pub const MODIFIERS: [&str; 4] = ["ctrl", "alt", "shift", "win"];

pub const NAVIGATION: [&str; 10] = [
    "enter", "tab", "escape", "backspace", "delete", "space", "up", "down", "left", "right",
];

pub fn key_table() -> Vec<String> {
    let mut keys: Vec<String> = ('a'..='z').map(|c| c.to_string()).collect();
    keys.extend(('0'..='9').map(|c| c.to_string()));
    keys.extend((1..=10).map(|n| format!("f{n}")));
    keys.extend(MODIFIERS.iter().map(|s| s.to_string()));
    keys.extend(NAVIGATION.iter().map(|s| s.to_string()));
    keys
}

pub fn is_key_name(k: &str) -> bool {
    let b = k.as_bytes();
    match b.len() {
        1 => b[0].is_ascii_lowercase() || b[0].is_ascii_digit(),
        _ => {
            MODIFIERS.contains(&k)
                || NAVIGATION.contains(&k)
                || k.strip_prefix('f')
                    .and_then(|n| n.parse::<u8>().ok())
                    .is_some_and(|n| (1..=10).contains(&n) && !k.starts_with("f0"))
        }
    }
}

/// Lowercased chord parts, or `None` if any part is outside the table or
/// repeats.
pub fn parse_chord(key: &str) -> Option<Vec<String>> {
    let parts: Vec<String> = key.split('+').map(|p| p.trim().to_lowercase()).collect();
    if parts.iter().any(|p| !is_key_name(p)) {
        return None;
    }
    let mut seen = std::collections::HashSet::new();
    parts.iter().all(|p| seen.insert(p.clone())).then_some(parts)
}

/// Normalized chord text (`Ctrl + S` -> `ctrl+s`).
pub fn normalize_chord(key: &str) -> Option<String> {
    parse_chord(key).map(|p| p.join("+"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_sixty_unique_names() {
        let t = key_table();
        assert_eq!(t.len(), 60);
        let set: std::collections::HashSet<_> = t.iter().collect();
        assert_eq!(set.len(), 60);
        assert!(t.iter().all(|k| is_key_name(k)));
    }

    #[test]
    fn chords() {
        assert_eq!(normalize_chord("ctrl+p").as_deref(), Some("ctrl+p"));
        assert_eq!(normalize_chord("Ctrl + Shift + S").as_deref(), Some("ctrl+shift+s"));
        assert!(parse_chord("ctrl+ctrl").is_none());
        assert!(parse_chord("hyper+x").is_none());
        assert!(parse_chord("f11").is_none());
        assert!(parse_chord("").is_none());
        assert!(parse_chord("f10").is_some());
    }
}
