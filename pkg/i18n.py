#! /usr/bin/env python

# 言語リソース
LANGUAGES = {
    "English": {
        "sidebar": {
            "welcome": """
            Upload a scenario file (toml/yaml) describing the UAVs, base stations, channel and users,
            then compare max-SNR association with the delay-optimal fixed point.
            """,
            "language": "Language",
            "syntax_of_each_file": "File syntax",
            "toml_syntax_doc": "https://toml.io/en/v1.0.0",
            "yaml_syntax_doc": "https://yaml.org/spec/1.2.2/",
            "subheader_grid": "Integration grid",
            "grid_nx": "Grid cells along x",
            "grid_ny": "Grid cells along y",
            "subheader_solver": "Solver options",
            "tol": "Mass change tolerance",
            "max_iter": "Maximum iterations",
            "damping": "Initial damping",
        },
        "tab1": {
            "menu_title": "Association",
            "subheader": "Cell association of one scenario",
            "upload_scenario": "Upload scenario file",
            "method": "Association method",
            "method_items": {
                "snr": "max-SNR",
                "ot": "delay-optimal (fixed point)",
            },
            "sigma_override": "Override hotspot width",
            "sigma": "Hotspot width sigma_o (m)",
            "run_button": "Run association",
            "download_button": "Download label grid (csv)",
            "average_delay": "Average delay (s)",
            "iterations": "Iterations",
            "violation": "Fixed-point violation",
            "summary_text": "Run summary",
            "success_run": "Association finished",
            "warning_not_converged": "The fixed-point iteration did not converge, the best iterate is shown",
            "error_scenario_parse": "Failed to load scenario file",
            "error_run": "Failed to run association",
            "error_no_scenario": "No scenario file loaded",
        },
        "tab2": {
            "menu_title": "Sigma sweep",
            "subheader": "Delay against hotspot width",
            "upload_scenario": "Upload scenario file",
            "sigma_list": "Hotspot widths (m, comma separated)",
            "sweep_button": "Run sweep",
            "download_button": "Download sweep (csv)",
            "success_sweep": "Sweep finished",
            "error_scenario_parse": "Failed to load scenario file",
            "error_sweep": "Failed to run sweep",
            "error_no_scenario": "No scenario file loaded",
        },
        "tab3": {
            "menu_title": "Oracle check",
            "subheader": "Fixed point against exhaustive search",
            "seed": "Random seed",
            "trials": "Number of random instances",
            "oracle_button": "Run oracle check",
            "report_text": "Oracle report",
            "success_oracle": "Oracle check passed",
            "error_oracle": "Oracle check failed",
            "error_oracle_run": "Failed to run oracle check",
        },
        "tab4": {
            "menu_title": "Samples",
            "subheader": "Sample scenario files",
        },
    },
    "日本語": {
        "sidebar": {
            "welcome": """
            このアプリケーションでは、UAV・地上基地局・チャネル・ユーザを記述した
            シナリオファイル(toml/yaml)をアップロードして、
            最大SNR接続と遅延最適な不動点接続を比較できます。
            """,
            "language": "言語",
            "syntax_of_each_file": "各ファイルの構文",
            "toml_syntax_doc": "https://toml.io/ja/v1.0.0",
            "yaml_syntax_doc": "https://docs.ansible.com/ansible/2.9_ja/reference_appendices/YAMLSyntax.html",
            "subheader_grid": "積分グリッド",
            "grid_nx": "x方向のセル数",
            "grid_ny": "y方向のセル数",
            "subheader_solver": "ソルバーの設定",
            "tol": "質量変化の許容誤差",
            "max_iter": "最大反復回数",
            "damping": "初期ダンピング係数",
        },
        "tab1": {
            "menu_title": "セル接続",
            "subheader": "シナリオのセル接続",
            "upload_scenario": "シナリオファイルをアップロード",
            "method": "接続方式",
            "method_items": {
                "snr": "最大SNR",
                "ot": "遅延最適 (不動点)",
            },
            "sigma_override": "ホットスポット幅を上書き",
            "sigma": "ホットスポット幅 sigma_o (m)",
            "run_button": "セル接続の実行",
            "download_button": "ラベルグリッドをダウンロード (csv)",
            "average_delay": "平均遅延 (秒)",
            "iterations": "反復回数",
            "violation": "不動点条件の違反量",
            "summary_text": "実行結果の要約",
            "success_run": "セル接続に成功",
            "warning_not_converged": "不動点反復が収束しませんでした。最良の反復結果を表示しています",
            "error_scenario_parse": "シナリオファイルの読み込みに失敗",
            "error_run": "セル接続の実行に失敗",
            "error_no_scenario": "シナリオファイルが読み込まれていません",
        },
        "tab2": {
            "menu_title": "シグマ掃引",
            "subheader": "ホットスポット幅に対する遅延",
            "upload_scenario": "シナリオファイルをアップロード",
            "sigma_list": "ホットスポット幅 (m, カンマ区切り)",
            "sweep_button": "掃引の実行",
            "download_button": "掃引結果をダウンロード (csv)",
            "success_sweep": "掃引に成功",
            "error_scenario_parse": "シナリオファイルの読み込みに失敗",
            "error_sweep": "掃引の実行に失敗",
            "error_no_scenario": "シナリオファイルが読み込まれていません",
        },
        "tab3": {
            "menu_title": "オラクル検証",
            "subheader": "全探索との比較",
            "seed": "乱数シード",
            "trials": "ランダムインスタンス数",
            "oracle_button": "オラクル検証の実行",
            "report_text": "オラクル検証の結果",
            "success_oracle": "オラクル検証に合格",
            "error_oracle": "オラクル検証に不合格",
            "error_oracle_run": "オラクル検証の実行に失敗",
        },
        "tab4": {
            "menu_title": "サンプル集",
            "subheader": "サンプルシナリオの表示",
        },
    },
}
