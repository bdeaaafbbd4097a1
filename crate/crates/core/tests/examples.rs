//! Runs every example's `main` so they stay working.

macro_rules! examples {
    ($($name:ident),* $(,)?) => {
        $(
            mod $name {
                include!(concat!("../examples/", stringify!($name), ".rs"));

                #[test]
                fn runs() {
                    main();
                }
            }
        )*
    };
}

examples!(
    link_budget,
    pa_models,
    closed_form_powers,
    feasibility_window,
    solve_schedules,
    oracle_check,
    convexity,
    cancellation_sweep,
    rate_sweep,
    imbalance_surface,
);
