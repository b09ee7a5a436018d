mod common;

use serde_json::Value;

use common::{query, read_fixture, start_channel, DataServer};

async fn get(url: String) -> (u16, reqwest::header::HeaderMap, String) {
    let r = reqwest::get(url).await.unwrap();
    let status = r.status().as_u16();
    let headers = r.headers().clone();
    (status, headers, r.text().await.unwrap())
}

async fn post_form(url: String, fields: &[(&str, &str)]) -> (u16, reqwest::header::HeaderMap, String) {
    let r = reqwest::Client::new()
        .post(url)
        .header("content-type", "application/x-www-form-urlencoded")
        .body(query(fields))
        .send()
        .await
        .unwrap();
    let status = r.status().as_u16();
    let headers = r.headers().clone();
    (status, headers, r.text().await.unwrap())
}

#[tokio::test]
async fn metadata_lists_every_template() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _) = start_channel(dir.path()).await;
    let (status, headers, body) = get(format!("{base}/metadata")).await;
    assert_eq!(status, 200);
    assert!(headers["content-type"].to_str().unwrap().starts_with("text/turtle"));
    for id in ["user1.design12", "user2.design40", "user7.design67", "user3.homepage", "user3.form"] {
        assert!(body.contains(id), "{id} missing from metadata");
    }
}

#[tokio::test]
async fn describe_class_and_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _) = start_channel(dir.path()).await;
    let (status, _, body) = get(format!("{base}/describe?object=foaf.Person")).await;
    assert_eq!(status, 200);
    assert!(body.contains("foaf.name"), "{body}");
    let (status, _, _) = get(format!("{base}/describe?object=foaf.Nothing")).await;
    assert_eq!(status, 404);
    let (status, _, _) = get(format!("{base}/describe")).await;
    assert_eq!(status, 400);
}

#[tokio::test]
async fn match_get_and_post_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _) = start_channel(dir.path()).await;
    let data = DataServer::start().await;
    let profile_text = read_fixture("user34.ttl");
    let profile = data.put("user34.ttl", profile_text.clone());
    let (status, _, via_get) = get(format!("{base}/match?{}", query(&[("object", "foaf.Person"), ("userProfile", &profile)]))).await;
    assert_eq!(status, 200, "{via_get}");
    let via_post = reqwest::Client::new()
        .post(format!("{base}/match?object=foaf.Person"))
        .body(profile_text)
        .send()
        .await
        .unwrap()
        .text()
        .await
        .unwrap();
    let a: Value = serde_json::from_str(&via_get).unwrap();
    let b: Value = serde_json::from_str(&via_post).unwrap();
    assert_eq!(a, b);
    assert_eq!(a["best"], "user7.design67");
    assert_eq!(a["candidates"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn register_then_render_with_new_template() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _) = start_channel(dir.path()).await;
    let features = read_fixture("registry/templates/user2/design40.features")
        .replace("provider = user2", "provider = user5")
        .replace("design = design40", "design = fresh");
    let body = "<em>[{OmemoGetP propName='foaf.name'}]</em>";
    let fields = [("body", body), ("features", features.as_str())];
    let (status, _, text) = post_form(format!("{base}/register"), &fields).await;
    assert_eq!(status, 201, "{text}");
    let (status, _, _) = post_form(format!("{base}/register"), &fields).await;
    assert_eq!(status, 409);
    let mut overwrite = fields.to_vec();
    overwrite.push(("overwrite", "true"));
    let (status, _, _) = post_form(format!("{base}/register"), &overwrite).await;
    assert_eq!(status, 201);

    let (status, headers, page) = post_form(
        format!("{base}/render"),
        &[
            ("action", "renderOutput"),
            ("object", "foaf.Person"),
            ("provider", "user5.fresh"),
            ("data", &read_fixture("people.ttl")),
        ],
    )
    .await;
    assert_eq!(status, 200);
    assert_eq!(headers["x-semrender-template"], "user5.fresh");
    assert!(page.contains("<em>Alice"), "{page}");
}

#[tokio::test]
async fn register_rejects_bad_body() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _) = start_channel(dir.path()).await;
    let features = read_fixture("registry/templates/user2/design40.features").replace("design = design40", "design = broken");
    let (status, _, _) = post_form(
        format!("{base}/register"),
        &[("body", "[{OmemoGetP}]"), ("features", &features)],
    )
    .await;
    assert_eq!(status, 400);
}

#[tokio::test]
async fn submission_is_retrievable() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _) = start_channel(dir.path()).await;
    let (status, headers, page) = post_form(
        format!("{base}/render"),
        &[
            ("action", "renderInput"),
            ("object", "foaf.Person"),
            ("prop:foaf.name", "Quinn <Q>"),
            ("submit", "Submit"),
        ],
    )
    .await;
    assert_eq!(status, 200);
    assert!(page.contains("Quinn &lt;Q&gt;"));
    let location = headers["location"].to_str().unwrap().to_owned();
    let id = location.rsplit('/').next().unwrap();
    let (status, _, turtle) = get(format!("{base}/submissions/{id}")).await;
    assert_eq!(status, 200);
    assert!(turtle.contains("Quinn <Q>"), "{turtle}");
    let (status, _, _) = get(format!("{base}/submissions/999")).await;
    assert_eq!(status, 404);
}

#[tokio::test]
async fn unknown_parameter_produces_warning_header() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _) = start_channel(dir.path()).await;
    let (status, headers, _) = post_form(
        format!("{base}/render"),
        &[
            ("action", "renderOutput"),
            ("object", "foaf.Person"),
            ("data", &read_fixture("people.ttl")),
            ("theme", "dark"),
        ],
    )
    .await;
    assert_eq!(status, 200);
    let warning = headers["warning"].to_str().unwrap();
    assert!(warning.starts_with("299 "), "{warning}");
    assert!(warning.contains("theme"), "{warning}");
}

#[tokio::test]
async fn error_pages_use_requested_format() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _) = start_channel(dir.path()).await;
    let (status, headers, body) = get(format!(
        "{base}/render?{}",
        query(&[("action", "renderOutput"), ("object", "foaf.Person"), ("outputFormat", "XHTML")])
    ))
    .await;
    assert_eq!(status, 400);
    assert!(headers["content-type"].to_str().unwrap().starts_with("application/xhtml+xml"));
    common::well_formed_xml(&body).unwrap();
}
