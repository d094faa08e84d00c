use osagent_core::action::{Action, ActionScript, Direction, ElementRef, ScriptStep};
use osagent_core::planner::{Decision, PlanResponse, TaskList};
use proptest::prelude::*;

pub fn unit() -> impl Strategy<Value = f64> {
    (0u32..=1000).prop_map(|k| k as f64 / 1000.0)
}

pub fn target() -> impl Strategy<Value = ElementRef> {
    prop_oneof![
        (1u32..500).prop_map(ElementRef::ById),
        (unit(), unit()).prop_map(|(x, y)| ElementRef::ByCoord { x, y }),
    ]
}

pub fn dir() -> impl Strategy<Value = Direction> {
    prop_oneof![
        Just(Direction::Up),
        Just(Direction::Down),
        Just(Direction::Left),
        Just(Direction::Right)
    ]
}

pub fn dist() -> impl Strategy<Value = f64> {
    (1u32..5000).prop_map(|k| k as f64 / 100.0)
}

pub fn text() -> impl Strategy<Value = String> {
    "[ -~\n\t\"\\\\éü中]{0,24}"
}

pub fn desktop_action() -> impl Strategy<Value = Action> {
    prop_oneof![
        target().prop_map(|target| Action::Move { target }),
        Just(Action::SingleClick),
        Just(Action::DoubleClick),
        Just(Action::RightClick),
        (-50i32..50)
            .prop_filter("nonzero", |d| *d != 0)
            .prop_map(|dist| Action::Scroll { dist }),
        (0i32..2000, 0i32..2000, 0i32..2000, 0i32..2000)
            .prop_map(|(x1, y1, x2, y2)| Action::Drag { x1, y1, x2, y2 }),
        "[a-z]{1,6}(\\+[a-z0-9]{1,6}){0,2}".prop_map(|key| Action::Press { key }),
        text().prop_map(|text| Action::Write { text }),
    ]
}

pub fn phone_action() -> impl Strategy<Value = Action> {
    prop_oneof![
        target().prop_map(|target| Action::Tap { target }),
        target().prop_map(|target| Action::LongTap { target }),
        (1u32..500, dir(), dist()).prop_map(|(id, dir, dist)| Action::SwipeElement { id, dir, dist }),
        (0i32..2000, 0i32..2000, dir(), dist())
            .prop_map(|(x, y, dir, dist)| Action::SwipeCoord { x, y, dir, dist }),
        text().prop_map(|text| Action::Write { text }),
    ]
}

pub fn comment() -> impl Strategy<Value = Option<String>> {
    proptest::option::of("[A-Za-z0-9][A-Za-z0-9 .,!?'-]{0,30}[A-Za-z0-9.]")
}

pub fn script(action: impl Strategy<Value = Action>) -> impl Strategy<Value = ActionScript> {
    proptest::collection::vec((action, comment()), 1..6).prop_map(|steps| ActionScript {
        steps: steps
            .into_iter()
            .map(|(action, comment)| ScriptStep { action, comment })
            .collect(),
    })
}

pub fn line() -> impl Strategy<Value = String> {
    "[A-Za-z0-9][A-Za-z0-9 ,.'\"()-]{0,40}[A-Za-z0-9.)\"]"
}

pub fn plan_response() -> impl Strategy<Value = PlanResponse> {
    (
        proptest::collection::vec(line(), 1..7),
        any::<prop::sample::Index>(),
        line(),
        prop_oneof![Just(Decision::Command), Just(Decision::Done), Just(Decision::Wait)],
        script(desktop_action()),
        proptest::option::of(line()),
    )
        .prop_map(|(tasks, cur, annotation, decision, code, memory)| {
            let current = cur.index(tasks.len()) + 1;
            PlanResponse {
                screen_annotation: annotation,
                task_list: TaskList::new(tasks, current).unwrap(),
                decision,
                action_code: (decision == Decision::Command).then(|| code.to_string()),
                memory_update: memory.unwrap_or_default(),
            }
        })
}
