def on_click():
    return 'clicked'

def on_hover():
    return 'hovered'

class Button:
    def __init__(self, handler):
        self.handler = handler
    def fire(self):
        return self.handler()

def main():
    b = Button(on_click)
    b.fire()
    h = Button(on_hover)
    h.fire()
