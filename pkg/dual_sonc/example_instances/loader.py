import json
from pathlib import Path
from typing import Dict, Optional

from dual_sonc.support import ExponentialSum, parse_instance

REFERENCES_FILE = 'references.json'


class InstanceLoader:
    def __init__(self, path_to_instances: str = None):

        if not path_to_instances:
            path_to_instances = Path(__file__).parent / 'json'

        self.path_to_instances = Path(path_to_instances)
        self.instances: Dict[str, ExponentialSum] = {}

    def instance_paths(self):
        return sorted(
            path
            for path in self.path_to_instances.glob(pattern='*.json')
            if path.name != REFERENCES_FILE
        )

    def fetch(self, name: str) -> ExponentialSum:
        path = self.path_to_instances / f'{name}.json'
        return parse_instance(path.read_text(encoding='utf-8'), name=name)

    def fetch_instances(self) -> Dict[str, ExponentialSum]:
        for path in self.instance_paths():
            self.instances[path.stem] = self.fetch(path.stem)
        return self.instances

    def references(self) -> Dict[str, Optional[float]]:
        """Expected ``opt`` per instance stem; ``None`` marks an infeasible instance"""
        path = self.path_to_instances / REFERENCES_FILE
        if not path.exists():
            return {}
        with open(path, 'r', encoding='utf-8') as fh:
            return json.load(fh)
