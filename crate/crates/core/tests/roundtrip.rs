mod common;

use common::strategies::{desktop_action, phone_action, plan_response, script};
use osagent_core::action::{parse_action_script, Platform};
use osagent_core::planner::{parse_plan_response, render_plan_response};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn desktop_script_print_parse(s in script(desktop_action())) {
        let printed = s.to_string();
        let back = parse_action_script(&printed, Platform::Desktop).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn smartphone_script_print_parse(s in script(phone_action())) {
        let back = parse_action_script(&s.to_string(), Platform::Smartphone).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn plan_response_render_parse(r in plan_response()) {
        let rendered = render_plan_response(&r);
        let back = parse_plan_response(&rendered).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(render_plan_response(&back), rendered);
    }
}
