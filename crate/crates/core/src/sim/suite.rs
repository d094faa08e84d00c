//! The bundled 20-task suite and directory loading.

use std::path::Path;

use super::task::{parse_task, SchemaError, TaskSpec};

macro_rules! bundled {
    ($($id:literal),* $(,)?) => {
        pub const BUNDLED_TASK_IDS: &[&str] = &[$($id),*];
        const BUNDLED_SOURCES: &[&str] = &[$(include_str!(concat!("../../data/tasks/", $id, ".toml"))),*];
    };
}

bundled!(
    "notepad_draft",
    "dark_mode",
    "rename_report",
    "device_name",
    "empty_todo",
    "print_report",
    "append_notes",
    "writer_title",
    "copy_notes",
    "bookmark_news",
    "calculator_sum",
    "weather_check",
    "shopping_list",
    "build_log",
    "autosave_on",
    "docs_version",
    "weather_note",
    "archive_todo",
    "phone_dark_mode",
    "phone_memo",
);

/// The bundled suite in its fixed order.
pub fn bundled_suite() -> Vec<TaskSpec> {
    BUNDLED_SOURCES
        .iter()
        .zip(BUNDLED_TASK_IDS)
        .map(|(src, id)| {
            parse_task(src).unwrap_or_else(|e| panic!("bundled task {id} is invalid: {e}"))
        })
        .collect()
}

/// Loads every `*.toml` in a directory, sorted by task id. Duplicate ids
/// are rejected.
pub fn load_suite(dir: &Path) -> Result<Vec<TaskSpec>, SchemaError> {
    let io = |e: std::io::Error| SchemaError::Io {
        path: dir.display().to_string(),
        reason: e.to_string(),
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    let mut tasks = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|e| SchemaError::Io {
            path: p.display().to_string(),
            reason: e.to_string(),
        })?;
        let spec = parse_task(&text).map_err(|e| match e {
            SchemaError::Field { field, reason } => SchemaError::Field {
                field: format!("{}: {field}", p.display()),
                reason,
            },
            other => other,
        })?;
        tasks.push(spec);
    }
    tasks.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = tasks.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(SchemaError::Field {
            field: "id".into(),
            reason: format!("duplicate task id {}", w[0].id),
        });
    }
    Ok(tasks)
}
