"""
GeoForge workbench - edit a CDL problem, deduce it, lay it out and look at it
"""

import logging
import os
import time

import kivy
kivy.require('2.0.0')

from kivy.app import App
from kivy.clock import Clock
from kivy.core.text import Label as CoreLabel
from kivy.graphics import Color, Ellipse, Line, Rectangle
from kivy.lang import Builder
from kivy.logger import Logger
from kivy.metrics import dp, sp
from kivy.properties import DictProperty, ListProperty, ObjectProperty, StringProperty
from kivy.uix.boxlayout import BoxLayout
from kivy.uix.button import Button
from kivy.uix.label import Label
from kivy.uix.popup import Popup
from kivy.uix.widget import Widget

from ..cdl import parse_problem, print_problem, validate
from ..engine import deduce
from ..layout import compile_constraints, optimize
from ..log import configure_logging, debug_log, logger
from ..render import diagram_spec, render_diagram
from ..rng import RNGManager
from ..synth import formalize, synthesize_batch
from ..verbalize import verbalize_problem, verbalize_solution
from .view import fit_viewport, nearest_point, point_details, screen_points

DEMO_PROBLEM = '''# problem: demo
Shape(AB,BD,DA)
Shape(AD,DC,CA)
Collinear(BDC)
IsoscelesTriangle(ABC)
IsAltitudeOfTriangle(AD,ABC)
IsMidpointOfLine(D,BC)
Equal(LengthOfLine(AB),5)
image: Equal(LengthOfLine(BC),6)
Value(LengthOfLine(AD))
'''

EXPORT_EDGE = 224

KV_STRING = '''
<WorkbenchLayout>:
    orientation: 'vertical'
    spacing: dp(5)
    padding: dp(5)

    BoxLayout:
        size_hint_y: 0.9
        spacing: dp(5)

        CodeInput:
            id: editor
            size_hint_x: 0.4
            font_size: sp(14)
            background_color: 0.1, 0.1, 0.1, 1
            foreground_color: 0.9, 0.9, 0.9, 1
            cursor_color: 1, 0.5, 0, 1

        DiagramWidget:
            id: diagram
            size_hint_x: 0.6

    BoxLayout:
        size_hint_y: None
        height: dp(50)
        spacing: dp(5)

        Button:
            text: 'Deduce'
            size_hint_x: 0.15
            background_color: 0.2, 0.8, 0.2, 1
            on_press: app.run_deduce()

        Button:
            text: 'Layout'
            size_hint_x: 0.15
            background_color: 0.2, 0.5, 0.9, 1
            on_press: app.run_layout()

        Button:
            text: 'Synthesize'
            size_hint_x: 0.15
            background_color: 0.6, 0.3, 0.9, 1
            on_press: app.run_synthesize()

        Button:
            text: 'Export'
            size_hint_x: 0.15
            background_color: 0.8, 0.6, 0.2, 1
            on_press: app.run_export()

        Label:
            id: status_label
            text: app.status_text
            size_hint_x: 0.4
            halign: 'left'
            valign: 'middle'
            text_size: self.width, None

<DetailsPopup>:
    size_hint: 0.8, 0.6
    title: root.heading

    BoxLayout:
        orientation: 'vertical'
        padding: dp(10)
        spacing: dp(10)

        ScrollView:
            size_hint_y: 0.9
            Label:
                text: root.details
                font_size: sp(14)
                size_hint_y: None
                height: self.texture_size[1]
                text_size: self.width, None

        Button:
            text: 'Close'
            size_hint_y: 0.1
            on_press: root.dismiss()
'''


class KivyForwarder(logging.Handler):
    """Mirror geoforge records into Kivy's Logger."""

    def emit(self, record):
        try:
            message = f"GeoForge: {record.getMessage()}"
            if record.levelno >= logging.ERROR:
                Logger.error(message)
            elif record.levelno >= logging.WARNING:
                Logger.warning(message)
            elif record.levelno >= logging.INFO:
                Logger.info(message)
            else:
                Logger.debug(message)
        except Exception:
            self.handleError(record)


class WorkbenchLayout(BoxLayout):
    pass


class DetailsPopup(Popup):
    heading = StringProperty("Details")
    details = StringProperty("")


class DiagramWidget(Widget):
    coordinates = DictProperty({})
    segments = ListProperty([])
    circles = ListProperty([])
    determined = DictProperty({})
    popup = ObjectProperty(None, allownone=True)

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.bind(
            size=self._update_canvas,
            pos=self._update_canvas,
            coordinates=self._update_canvas,
            segments=self._update_canvas,
            circles=self._update_canvas,
        )

    def show_layout(self, layout, spec):
        self.segments = list(spec.segments)
        self.circles = list(spec.circles)
        self.coordinates = dict(layout.coordinates)

    def clear(self):
        self.coordinates = {}
        self.segments = []
        self.circles = []

    def _screen(self):
        return screen_points(self.coordinates, fit_viewport(self.pos, self.size))

    def _update_canvas(self, *args):
        try:
            self.canvas.after.clear()
            viewport = fit_viewport(self.pos, self.size)
            points = screen_points(self.coordinates, viewport)
            with self.canvas.after:
                Color(0.97, 0.97, 0.97, 1)
                Rectangle(pos=self.pos, size=self.size)

                Color(0.1, 0.1, 0.1, 1)
                for a, b in self.segments:
                    if a in points and b in points:
                        Line(points=[*points[a], *points[b]], width=dp(1.2))
                for center, radius in self.circles:
                    if center in points:
                        cx, cy = points[center]
                        Line(circle=(cx, cy, radius * viewport.unit), width=dp(1.2))

                for name, (x, y) in points.items():
                    Color(0.8, 0.2, 0.2, 1)
                    Ellipse(pos=(x - dp(3), y - dp(3)), size=(dp(6), dp(6)))
                    label = CoreLabel(text=name, font_size=sp(14))
                    label.refresh()
                    Color(0.1, 0.1, 0.1, 1)
                    Rectangle(texture=label.texture, pos=(x + dp(4), y + dp(4)), size=label.texture.size)
        except Exception as e:
            debug_log(f"Diagram draw error: {e}", "ERROR")

    def on_touch_down(self, touch):
        try:
            if self.collide_point(*touch.pos) and self.coordinates:
                name = nearest_point(self._screen(), touch.pos, dp(18))
                if name is not None:
                    self.show_point(name)
                    return True
        except Exception as e:
            debug_log(f"Touch error: {e}", "ERROR")
        return super().on_touch_down(touch)

    def show_point(self, name):
        if not self.popup:
            self.popup = DetailsPopup()
        self.popup.heading = f"Point {name}"
        self.popup.details = point_details(name, self.coordinates, self.determined)
        self.popup.open()


class GeoForgeWorkbench(App):
    status_text = StringProperty("Ready")

    def build(self):
        try:
            debug_log("Building workbench...")
            self.title = "GeoForge Workbench"
            self.layout = WorkbenchLayout()
            self.layout.ids.editor.text = DEMO_PROBLEM
            self.problem = None
            self.result = None
            self.solution = None
            self.streams = RNGManager(0)
            Clock.schedule_once(lambda dt: self.run_layout(), 0.5)
            return self.layout
        except Exception as e:
            debug_log(f"Build error: {e}", "ERROR")
            layout = BoxLayout(orientation='vertical')
            layout.add_widget(Label(text=f"GeoForge Error: {e}"))
            layout.add_widget(Button(text="OK", size_hint_y=None, height=dp(50)))
            return layout

    @property
    def diagram(self):
        return self.layout.ids.diagram

    def _parse(self):
        problem = parse_problem(self.layout.ids.editor.text)
        report = validate(problem)
        if not report.ok:
            raise ValueError(report.summary())
        self.problem = problem
        return problem

    def run_deduce(self, *args):
        try:
            problem = self._parse()
            self.result = deduce(problem, stop_on_goal=False)
            self.diagram.determined = dict(self.result.store.determined)
            goal = self.result.goal_symbol
            if self.result.solved:
                goal_text = f"{goal} = {self.result.store.determined[goal]}"
            else:
                goal_text = "goal open" if goal else "no goal"
            self.status_text = f"{len(self.result.store.determined)} value(s), {len(self.result.trace)} step(s); {goal_text}"
        except Exception as e:
            self.status_text = f"Deduce Error: {e}"
            debug_log(f"Deduce error: {e}", "ERROR")

    def run_layout(self, *args):
        try:
            problem = self._parse()
            if self.result is None or self.result.problem != problem:
                self.run_deduce()
            system = compile_constraints(problem.constructions, problem.image_facts, problem.text_facts)
            outcome = optimize(system, self.streams.fresh(problem.id or "workbench", "layout"))
            if not outcome:
                self.solution = None
                self.diagram.clear()
                self.status_text = f"Layout rejected: {outcome.reason} {outcome.detail}"
                return
            self.solution = outcome
            self.diagram.show_layout(outcome, diagram_spec(problem, outcome))
            self.status_text = f"Layout loss {outcome.total_loss:.2e} after {outcome.restarts_used} restart(s)"
        except Exception as e:
            self.status_text = f"Layout Error: {e}"
            debug_log(f"Layout error: {e}", "ERROR")

    def run_synthesize(self, *args):
        try:
            problem = self._parse()
            seed = formalize(problem)
            batch = synthesize_batch(seed, 1, self.streams)
            if not batch.candidates:
                reasons = ", ".join(f"{r} x{n}" for r, n in sorted(batch.diagnostics.items()))
                self.status_text = f"No candidate: {reasons}"
                return
            candidate = batch.candidates[0]
            self.layout.ids.editor.text = print_problem(candidate.problem)
            question = verbalize_problem(candidate.problem, rng=self.streams.fresh(candidate.id, "question"))
            solution = verbalize_solution(candidate.trace, candidate.goal_value, rng=self.streams.fresh(candidate.id, "solution"))
            popup = DetailsPopup(heading=f"Candidate {candidate.id} ({candidate.provenance})")
            popup.details = f"{question}\n\n{solution}"
            popup.open()
            self.result = None
            self.run_layout()
        except Exception as e:
            self.status_text = f"Synthesize Error: {e}"
            debug_log(f"Synthesize error: {e}", "ERROR")

    def run_export(self, *args):
        try:
            if self.problem is None or self.solution is None:
                self.status_text = "No diagram to export"
                return
            diagram = render_diagram(diagram_spec(self.problem, self.solution, EXPORT_EDGE))
            stem = os.path.join(os.path.expanduser("~"), f"geoforge_export_{int(time.time())}")
            with open(stem + ".png", "wb") as f:
                f.write(diagram.png)
            with open(stem + ".svg", "w", encoding="utf-8") as f:
                f.write(diagram.svg)
            self.status_text = f"Exported to: {stem}.png"
        except Exception as e:
            self.status_text = f"Export failed: {e}"
            debug_log(f"Export error: {e}", "ERROR")


def run_workbench():
    configure_logging()
    if not any(isinstance(h, KivyForwarder) for h in logger.handlers):
        logger.addHandler(KivyForwarder())
    try:
        Builder.load_string(KV_STRING)
    except Exception as e:
        debug_log(f"Failed to load UI layout: {e}", "ERROR")
        raise
    GeoForgeWorkbench().run()
