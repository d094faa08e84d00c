//! The mock terminal's command set: `mkdir`, `touch`, `echo TEXT > PATH`,
//! `echo TEXT >> PATH`, `mv`, `rm`, `cat`, `ls`. Paths must be absolute.
//! `echo` writes the text without a trailing newline.

use super::desktop::{parent_folder, MockDesktop};

fn unquote(s: &str) -> String {
    let s = s.trim();
    for q in ['"', '\''] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return s[1..s.len() - 1].to_string();
        }
    }
    s.to_string()
}

fn absolute(p: &str) -> Result<String, String> {
    let p = unquote(p);
    if !p.starts_with('/') {
        return Err(format!("{p}: paths must be absolute"));
    }
    let t = p.trim_end_matches('/');
    Ok(if t.is_empty() { "/".into() } else { t.to_string() })
}

fn exec(d: &mut MockDesktop, line: &str) -> Result<Vec<String>, String> {
    let line = line.trim();
    let (cmd, rest) = line.split_once(' ').unwrap_or((line, ""));
    let rest = rest.trim();
    match cmd {
        "" => Ok(vec![]),
        "mkdir" => {
            let p = absolute(rest)?;
            if !d.folders.contains(parent_folder(&p)) {
                return Err(format!("mkdir: {}: no such folder", parent_folder(&p)));
            }
            if d.files.contains_key(&p) || !d.folders.insert(p.clone()) {
                return Err(format!("mkdir: {p}: already exists"));
            }
            Ok(vec![])
        }
        "touch" => {
            let p = absolute(rest)?;
            if !d.folders.contains(parent_folder(&p)) {
                return Err(format!("touch: {}: no such folder", parent_folder(&p)));
            }
            if d.folders.contains(&p) {
                return Err(format!("touch: {p}: is a folder"));
            }
            d.files.entry(p).or_default();
            Ok(vec![])
        }
        "echo" => {
            let (text, append, target) = if let Some((t, p)) = rest.split_once(">>") {
                (t, true, Some(p))
            } else if let Some((t, p)) = rest.split_once('>') {
                (t, false, Some(p))
            } else {
                (rest, false, None)
            };
            let text = unquote(text);
            match target {
                None => Ok(vec![text]),
                Some(p) => {
                    let p = absolute(p)?;
                    if !d.folders.contains(parent_folder(&p)) {
                        return Err(format!("echo: {}: no such folder", parent_folder(&p)));
                    }
                    let f = d.files.entry(p).or_default();
                    if !append {
                        f.clear();
                    }
                    f.push_str(&text);
                    Ok(vec![])
                }
            }
        }
        "mv" => {
            let (a, b) = rest.split_once(' ').ok_or("mv: expected two paths")?;
            let (a, b) = (absolute(a)?, absolute(b)?);
            if !d.folders.contains(parent_folder(&b)) {
                return Err(format!("mv: {}: no such folder", parent_folder(&b)));
            }
            if d.files.contains_key(&b) || d.folders.contains(&b) {
                return Err(format!("mv: {b}: already exists"));
            }
            let content = d.files.remove(&a).ok_or_else(|| format!("mv: {a}: no such file"))?;
            d.files.insert(b, content);
            Ok(vec![])
        }
        "rm" => {
            let p = absolute(rest)?;
            d.files.remove(&p).ok_or_else(|| format!("rm: {p}: no such file"))?;
            Ok(vec![])
        }
        "cat" => {
            let p = absolute(rest)?;
            let c = d.files.get(&p).ok_or_else(|| format!("cat: {p}: no such file"))?;
            Ok(c.lines().map(str::to_string).collect())
        }
        "ls" => {
            let p = if rest.is_empty() { "/".to_string() } else { absolute(rest)? };
            if !d.folders.contains(&p) {
                return Err(format!("ls: {p}: no such folder"));
            }
            Ok(d.list_folder(&p))
        }
        other => Err(format!("{other}: command not found")),
    }
}

/// Runs one command line and returns the lines it prints. Failures are
/// printed, not raised: the command still ran.
pub fn run(d: &mut MockDesktop, line: &str) -> Vec<String> {
    exec(d, line).unwrap_or_else(|e| vec![e])
}
