import plotly.graph_objects as go
import pandas as pd
import json
import sys
import os

# Read report path from command line (required)
if len(sys.argv) < 2:
    print("Usage: python drift-sequence-chart-generator.py <report.json>")
    sys.exit(1)
report_file = sys.argv[1]

with open(report_file, encoding='utf-8') as f:
    report = json.load(f)

if report.get('command') != 'drift sequence':
    print(f"Expected a 'drift sequence' report, got '{report.get('command')}'")
    sys.exit(1)

# One row per window
df = pd.DataFrame([r for r in report['results'] if r.get('kind') == 'window'])
if df.empty:
    print("Report has no windows")
    sys.exit(1)

# Nulls come back as NaN; not-applicable windows enter the family at p = 1
df['raw_p_value'] = df['raw_p_value'].fillna(1.0).clip(lower=1e-300)
df['adjusted_p_value'] = df['adjusted_p_value'].fillna(1.0).clip(lower=1e-300)
df['x'] = df.apply(lambda row: f"{row['start']}-{row['stop']}", axis=1)

alpha = report['alpha']
test = report['parameters'].get('test', '')
title = f"{os.path.basename(report_file).replace('.json', '')} ({test}, alpha {alpha:g})"

fig = go.Figure()

# Raw p-values, thin
fig.add_trace(
    go.Scatter(
        x=df['index'],
        y=df['raw_p_value'],
        mode='lines+markers',
        line=dict(color='rgba(173, 216, 230, 0.7)', width=1),
        marker=dict(size=6, color='rgba(173, 216, 230, 0.9)'),
        name='Raw p-value',
        hoverinfo='text',
        text=[f"Rows {x}<br>Raw p: {p:.4g}" for x, p in zip(df['x'], df['raw_p_value'])],
    )
)

# Holm-adjusted p-values, colored by decision
colors = df['decision'].map({'drift': '#DB4545', 'no-drift': '#4CAF50'}).fillna('gray')
fig.add_trace(
    go.Scatter(
        x=df['index'],
        y=df['adjusted_p_value'],
        mode='lines+markers',
        line=dict(color='rgba(224, 224, 224, 0.6)', width=2),
        marker=dict(size=12, color=colors, line=dict(width=1, color='white')),
        name='Adjusted p-value',
        hoverinfo='text',
        text=[f"Rows {x}<br>Adjusted p: {p:.4g}<br>{d}"
              for x, p, d in zip(df['x'], df['adjusted_p_value'], df['decision'])],
    )
)

fig.add_hline(
    y=alpha,
    line_dash="dash",
    line_color="orange",
    line_width=3,
    annotation_text=f"alpha {alpha:g}",
    annotation_position="left",
    annotation_font=dict(size=16, color="orange", family="Arial")
)

first = report['summary'].get('first_drift_index')
if first is not None:
    fig.add_vline(
        x=first,
        line_dash="dot",
        line_color="rgba(219, 69, 69, 0.6)",
        line_width=2,
        annotation_text="First drift",
        annotation_font=dict(size=14, color="#DB4545", family="Arial")
    )

fig.update_layout(
    title={
        "text": title,
        "x": 0.5,
        "xanchor": "center",
        "font": {
            "size": 26,
            "color": "rgba(224, 224, 224, 0.5)",
            "family": "Arial Black",
        }
    },
    xaxis=dict(
        showgrid=True,
        gridcolor="rgba(128, 128, 128, 0.2)",
        tickfont=dict(size=14, family="Arial", color="white"),
        tickmode='array',
        tickvals=df['index'].tolist(),
        ticktext=df['x'].tolist(),
        zeroline=False,
    ),
    yaxis=dict(
        type='log',
        showgrid=True,
        gridcolor="rgba(128, 128, 128, 0.2)",
        tickfont=dict(size=14, family="Arial", color="white"),
        title="p-value",
    ),
    plot_bgcolor="#131722",
    paper_bgcolor="#131722",
    font=dict(color="white"),
    margin=dict(l=120, r=20, t=80, b=60),
    height=700,
    width=1200,
)

# Show interactive chart
fig.show()
