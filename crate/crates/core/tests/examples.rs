macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                main();
            }
        }
    };
}

example!(field_arithmetic);
example!(linear_algebra);
example!(subspaces);
example!(rs_family);
example!(verify_family);
example!(bounds_table);
example!(random_family);
example!(code_based);
example!(search_tightness);
example!(batch_code);
example!(cli_roundtrip);
