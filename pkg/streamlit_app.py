"""Streamlit results browser for NHC Lab runs (tables and metrics only)."""

import logging
import streamlit as st
import sys
sys.path.append('.')

from src.catalog import RunCatalog
from src.config import LOG_LEVEL
from src.harness.report import load_export_dir, summarize_export

logging.basicConfig(level=LOG_LEVEL)

# Page configuration
st.set_page_config(
    page_title="NHC Lab - Results",
    layout="wide"
)


@st.cache_resource
def get_catalog():
    return RunCatalog()


catalog = get_catalog()

st.title("NHC Lab results browser")
st.subheader("Neighborhood Confidence runs")

runs = catalog.list_runs()

with st.sidebar:
    st.header("Run catalog")
    st.metric("Catalogued runs", len(runs))
    protocol_filter = st.selectbox("Protocol", ["all", "shift", "ood", "adv", "hyper"])
    st.divider()
    manual_dir = st.text_input("Or open an export directory", value="")

if protocol_filter != "all":
    runs = [r for r in runs if protocol_filter in r["protocols"]]

if runs:
    st.dataframe(
        [{k: r[k] for k in ("run_id", "protocols", "variant_count", "seed", "export_format", "created_at")}
         for r in runs],
        use_container_width=True
    )

choices = {r["run_id"]: r["output_dir"] for r in runs}
selected = st.selectbox("Run", list(choices)) if choices else None
out_dir = manual_dir or (choices[selected] if selected else None)

if not out_dir:
    st.info("No runs yet. Run `python -m src run --config configs/default_experiment.json` first.")
else:
    try:
        tables = summarize_export(out_dir)
        bundle = load_export_dir(out_dir)

        st.markdown(f"### Export: `{out_dir}`")
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("Threshold curves", len(bundle.curves))
        with col2:
            st.metric("CDF series", len(bundle.cdfs))
        with col3:
            st.metric("Sweep rows", len(tables["sweep"]))

        if not tables["curves"].empty:
            st.markdown("### Threshold-accuracy summary")
            st.dataframe(tables["curves"], use_container_width=True)
            variant = st.selectbox("Curve", sorted(bundle.curves))
            st.dataframe(bundle.curves[variant].to_frame(), use_container_width=True)

        if not tables["cdfs"].empty:
            st.markdown("### Confidence CDF quartiles")
            st.dataframe(tables["cdfs"], use_container_width=True)

        if not tables["sweep"].empty:
            st.markdown("### Severity sweep")
            st.dataframe(tables["sweep"], use_container_width=True)

    except Exception as e:
        st.error(f"Error: {str(e)}")
        st.exception(e)
